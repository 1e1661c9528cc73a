//! Littlewood-Paley projectors and sharp frequency cutoffs.

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::multiplier::apply_radial;
use serde::{Deserialize, Serialize};

/// Index of a dyadic annulus: block 0 is the ball `|k| <= 2`, block `j >= 1`
/// the annulus `2^{j-1} <= |k| <= 2^{j+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicIndex(pub u32);

fn glue(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Smooth cutoff: `chi(r) = 1` for `r <= 1`, `0` for `r >= 2`, joined by the
/// standard `exp(-1/t)` mollifier so the profile is C-infinity.
pub fn chi(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let a = glue(2.0 - r);
        a / (a + glue(r - 1.0))
    }
}

/// The bump `phi_j(|k|)`: `chi(|k|/2^j) - chi(|k|/2^{j-1})` for `j >= 1`,
/// `chi(|k|)` for `j = 0`. The sum over `j` telescopes to 1 exactly.
pub fn bump(j: DyadicIndex, radius: f64) -> f64 {
    let pow = (1u64 << j.0) as f64;
    if j.0 == 0 {
        chi(radius)
    } else {
        chi(radius / pow) - chi(radius / (pow / 2.0))
    }
}

/// Projector onto the `j`-th dyadic block: multiplies by the smooth bump.
pub fn dyadic_project(f: &ComplexField, j: DyadicIndex) -> ComplexField {
    apply_radial(f, |k2| bump(j, k2.sqrt())).expect("bump is finite")
}

/// Smallest number of blocks whose bumps cover the whole lattice, so that
/// summing `dyadic_project` over `0..count` reproduces the field.
pub fn blocks_covering(f: &ComplexField) -> u32 {
    let r = f.grid().max_radius();
    let mut j = 0u32;
    while (1u64 << j) as f64 <= r {
        j += 1;
    }
    j + 1
}

/// Sharp cutoff to the closed ball `|k| <= n_cut`. The boundary `|k| = n_cut`
/// belongs to the low part.
pub fn low_pass(f: &ComplexField, n_cut: f64) -> Result<ComplexField> {
    if !(n_cut.is_finite() && n_cut >= 1.0) {
        return Err(Error::Parameter(format!(
            "cutoff frequency must be >= 1, got {n_cut}"
        )));
    }
    let n2 = n_cut * n_cut;
    apply_radial(f, |k2| if k2 <= n2 { 1.0 } else { 0.0 })
}

/// Complement of [`low_pass`]: modes with `|k| > n_cut`.
pub fn high_pass(f: &ComplexField, n_cut: f64) -> Result<ComplexField> {
    if !(n_cut.is_finite() && n_cut >= 1.0) {
        return Err(Error::Parameter(format!(
            "cutoff frequency must be >= 1, got {n_cut}"
        )));
    }
    let n2 = n_cut * n_cut;
    apply_radial(f, |k2| if k2 <= n2 { 0.0 } else { 1.0 })
}
