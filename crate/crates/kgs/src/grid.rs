//! Periodic grids and their frequency lattices.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A periodic box `[0, L)^d` sampled on `n` points per axis.
///
/// The frequency lattice consists of integer vectors with components in
/// `[-n/2, n/2)`, scaled by `2*pi/L` when the box is not `2*pi`-periodic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    n: usize,
    length: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Grid> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Parameter(format!("dim must be 1, 2 or 3, got {dim}")));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::Parameter(format!(
                "n must be a power of two >= 4, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Parameter(format!("box length must be positive, got {length}")));
        }
        Ok(Grid { dim, n, length })
    }

    /// The canonical `2*pi`-periodic box, whose lattice is `Z^d`.
    pub fn standard(dim: usize, n: usize) -> Result<Grid> {
        Grid::new(dim, n, 2.0 * PI)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Total number of lattice points (`n^d`).
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Scale factor from integer lattice indices to physical frequencies.
    pub fn freq_scale(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Integer frequency along one axis for array index `i`.
    #[inline]
    pub fn axis_freq(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Array index along one axis for integer frequency `k`.
    #[inline]
    pub fn axis_index(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    /// Integer frequency vector for a flat row-major index. Unused axes are 0.
    #[inline]
    pub fn freq_of(&self, mut flat: usize) -> [i64; 3] {
        let mut out = [0i64; 3];
        for axis in (0..self.dim).rev() {
            out[axis] = self.axis_freq(flat % self.n);
            flat /= self.n;
        }
        out
    }

    /// Flat index of an integer frequency vector.
    pub fn index_of(&self, k: &[i64]) -> usize {
        debug_assert_eq!(k.len(), self.dim);
        let mut flat = 0;
        for &ki in k {
            flat = flat * self.n + self.axis_index(ki);
        }
        flat
    }

    /// `|k|^2` in physical (scaled) frequency units for a flat index.
    #[inline]
    pub fn k2_of(&self, flat: usize) -> f64 {
        let k = self.freq_of(flat);
        let s = self.freq_scale();
        let mut acc = 0.0;
        for axis in 0..self.dim {
            let v = k[axis] as f64 * s;
            acc += v * v;
        }
        acc
    }

    /// Largest `|k|` present on the lattice (attained in a corner).
    pub fn max_radius(&self) -> f64 {
        let half = (self.n / 2) as f64 * self.freq_scale();
        half * (self.dim as f64).sqrt()
    }

    /// Grid enlarged by the 3/2 zero-padding rule for quadratic products.
    pub fn padded(&self) -> Grid {
        Grid {
            dim: self.dim,
            n: self.n * 3 / 2,
            length: self.length,
        }
    }

    /// Flat index of the same integer frequency on `other`; `None` if the mode
    /// does not exist there.
    pub fn embed_index(&self, flat: usize, other: &Grid) -> Option<usize> {
        let k = self.freq_of(flat);
        let half = (other.n / 2) as i64;
        let mut out = 0;
        for axis in 0..self.dim {
            if k[axis] < -half || k[axis] >= half {
                return None;
            }
            out = out * other.n + other.axis_index(k[axis]);
        }
        Some(out)
    }
}
