//! Numerical probes: dispersive space-time norms on a finite time window and
//! the dyadic bilinear product measurement, plus the shared slope-fitting
//! helper.

use crate::dyadic::{dyadic_project, DyadicIndex};
use crate::error::{Error, Result};
use crate::evolution::{kg_propagate, schrodinger_propagate, Sign};
use crate::field::{product, ComplexField};
use crate::fft::transform_nd;
use crate::grid::Grid;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Least-squares fit of `log2 y` against `log2 x`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Fits a power law through the given `(x, y)` points in log2-log2
/// coordinates. All coordinates must be positive; at least 3 distinct
/// abscissae are required.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateSweep(format!(
            "need at least 3 points for a slope fit, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0 || !x.is_finite() || !y.is_finite()) {
        return Err(Error::Domain("slope fit requires positive finite coordinates".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.log2(), y.log2())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx = logs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    if sxx == 0.0 {
        return Err(Error::DegenerateSweep("all abscissae coincide".into()));
    }
    let sxy = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
    let syy = logs.iter().map(|p| (p.1 - my).powi(2)).sum::<f64>();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(SlopeFit { slope, intercept, r2 })
}

/// Taper applied to the time samples before the temporal transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    /// `w_i = (1 - cos(2 pi i / M)) / 2`; default, suppresses wrap-around
    /// leakage of the finite window.
    Hann,
    /// No taper.
    Boxcar,
}

impl Window {
    fn weight(self, i: usize, m: usize) -> f64 {
        match self {
            Window::Hann => 0.5 * (1.0 - (2.0 * PI * i as f64 / m as f64).cos()),
            Window::Boxcar => 1.0,
        }
    }
}

/// A field sampled on a uniform time grid `t_i = i T_w / M`, `i = 0..M`,
/// over the window `[0, T_w)`.
#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    grid: Grid,
    t_window: f64,
    samples: Vec<ComplexField>,
    window: Window,
}

impl SpaceTimeField {
    pub fn new(t_window: f64, samples: Vec<ComplexField>, window: Window) -> Result<SpaceTimeField> {
        if samples.len() < 8 {
            return Err(Error::Parameter(format!(
                "need at least 8 time samples, got {}",
                samples.len()
            )));
        }
        if !(t_window > 0.0 && t_window.is_finite()) {
            return Err(Error::Parameter(format!("window length must be positive, got {t_window}")));
        }
        let grid = *samples[0].grid();
        if samples.iter().any(|f| f.grid() != &grid) {
            return Err(Error::GridMismatch);
        }
        Ok(SpaceTimeField { grid, t_window, samples, window })
    }

    /// Samples a time-dependent field generator on the uniform grid.
    pub fn sample<F>(t_window: f64, m: usize, window: Window, mut gen: F) -> Result<SpaceTimeField>
    where
        F: FnMut(f64) -> Result<ComplexField>,
    {
        let samples: Vec<ComplexField> = (0..m)
            .map(|i| gen(i as f64 * t_window / m as f64))
            .collect::<Result<_>>()?;
        SpaceTimeField::new(t_window, samples, window)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn times(&self) -> Vec<f64> {
        let m = self.samples.len();
        (0..m).map(|i| i as f64 * self.t_window / m as f64).collect()
    }

    /// Windowed space-time `L^2` norm by the rectangle rule (the window is
    /// part of the measure; with a boxcar it is the plain discrete norm).
    pub fn l2_norm(&self) -> f64 {
        let m = self.samples.len();
        let dt = self.t_window / m as f64;
        let mut acc = 0.0;
        for (i, f) in self.samples.iter().enumerate() {
            let w = self.window.weight(i, m);
            acc += dt * (w * w) * f.l2_norm().powi(2);
        }
        acc.sqrt()
    }

    /// Temporal Fourier transform of the windowed samples:
    /// `fhat(k, tau_j) = (T_w^{1/2}/M) sum_i w_i f(k, t_i) e^{-2 pi i ij/M}`
    /// with `tau_j = 2 pi j / T_w` and `j` interpreted symmetrically. The
    /// normalization makes the transform unitary against [`l2_norm`].
    fn temporal_transform(&self) -> (Vec<Vec<Complex64>>, Vec<f64>) {
        let m = self.samples.len();
        let nx = self.grid.len();
        // time-major: rows are time samples, columns spatial modes
        let mut data: Vec<Complex64> = Vec::with_capacity(m * nx);
        for (i, f) in self.samples.iter().enumerate() {
            let w = self.window.weight(i, m);
            data.extend(f.coeffs().iter().map(|c| c * w));
        }
        // transform each spatial column in time
        let mut col = vec![Complex64::default(); m];
        let scale = self.t_window.sqrt() / m as f64;
        let mut out = vec![vec![Complex64::default(); nx]; m];
        for k in 0..nx {
            for i in 0..m {
                col[i] = data[i * nx + k];
            }
            transform_nd(&mut col, 1, m, false);
            for j in 0..m {
                out[j][k] = col[j] * scale;
            }
        }
        let taus: Vec<f64> = (0..m)
            .map(|j| {
                let js = if j < m / 2 { j as i64 } else { j as i64 - m as i64 };
                2.0 * PI * js as f64 / self.t_window
            })
            .collect();
        (out, taus)
    }
}

/// Which characteristic surface the temporal weight is centered on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dispersion {
    /// `phi(k) = |k|^2`.
    Schrodinger,
    /// `phi(k) = <k>`.
    KgPlus,
    /// `phi(k) = -<k>`.
    KgMinus,
}

impl Dispersion {
    fn phase(self, k2: f64) -> f64 {
        match self {
            Dispersion::Schrodinger => k2,
            Dispersion::KgPlus => (1.0 + k2).sqrt(),
            Dispersion::KgMinus => -(1.0 + k2).sqrt(),
        }
    }
}

/// Discrete dispersive norm `|| <k>^s <tau + phi(k)>^b fhat(k, tau) ||_{l^2}`
/// of the windowed samples.
pub fn xsb_norm(f: &SpaceTimeField, s: f64, b: f64, dispersion: Dispersion) -> Result<f64> {
    if !(s.is_finite() && b.is_finite()) {
        return Err(Error::Parameter(format!("indices must be finite, got s = {s}, b = {b}")));
    }
    let (coeffs, taus) = f.temporal_transform();
    let grid = f.grid();
    let mut acc = 0.0;
    for (j, row) in coeffs.iter().enumerate() {
        for (k, c) in row.iter().enumerate() {
            let k2 = grid.k2_of(k);
            let ws = (1.0 + k2).powf(s);
            let arg = taus[j] + dispersion.phase(k2);
            let wb = (1.0 + arg * arg).powf(b);
            acc += ws * wb * c.norm_sqr();
        }
    }
    Ok(acc.sqrt())
}

/// Result of one bilinear product measurement.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BilinearProbe {
    pub l: u32,
    pub m: u32,
    /// `||u||_{L^2_{x,t}} / (||f1|| ||f2||)` with
    /// `u(t) = e^{it Lap} f1 * e^{-+it A^{1/2}} f2`.
    pub ratio: f64,
    /// `ratio / 2^{m - l/2}`, the margin against the dyadic product bound.
    pub bound_factor: f64,
}

/// Measures the space-time size of the product of a Schrodinger wave at
/// dyadic block `l` and a Klein-Gordon wave at block `m`.
///
/// Random fields are projected onto the blocks and normalized; the product is
/// dealiased; the time integral over `[0, t_window]` uses the trapezoid rule
/// on `samples` nodes.
pub fn bilinear_probe(
    grid: Grid,
    l: DyadicIndex,
    m: DyadicIndex,
    sign: Sign,
    t_window: f64,
    samples: usize,
    seed: u64,
) -> Result<BilinearProbe> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f1 = annulus_field(grid, l, &mut rng)?;
    let f2 = annulus_field(grid, m, &mut rng)?;
    bilinear_probe_with_fields(&f1, &f2, l, m, sign, t_window, samples)
}

/// As [`bilinear_probe`], with caller-provided block-supported fields. The
/// ratio is invariant under rescaling either input.
pub fn bilinear_probe_with_fields(
    f1: &ComplexField,
    f2: &ComplexField,
    l: DyadicIndex,
    m: DyadicIndex,
    sign: Sign,
    t_window: f64,
    samples: usize,
) -> Result<BilinearProbe> {
    if samples < 8 {
        return Err(Error::Parameter(format!("need at least 8 time samples, got {samples}")));
    }
    if !(t_window > 0.0 && t_window.is_finite()) {
        return Err(Error::Parameter(format!("window length must be positive, got {t_window}")));
    }
    let n1 = f1.l2_norm();
    let n2 = f2.l2_norm();
    if n1 == 0.0 || n2 == 0.0 {
        return Ok(BilinearProbe {
            l: l.0,
            m: m.0,
            ratio: 0.0,
            bound_factor: 0.0,
        });
    }
    let dt = t_window / (samples - 1) as f64;
    let mut acc = 0.0;
    for i in 0..samples {
        let t = i as f64 * dt;
        let u = product(&schrodinger_propagate(f1, t), &kg_propagate(f2, t, sign))?;
        let weight = if i == 0 || i == samples - 1 { 0.5 } else { 1.0 };
        acc += weight * dt * u.l2_norm().powi(2);
    }
    let ratio = acc.sqrt() / (n1 * n2);
    let bound = 2f64.powf(m.0 as f64 - l.0 as f64 / 2.0);
    Ok(BilinearProbe {
        l: l.0,
        m: m.0,
        ratio,
        bound_factor: ratio / bound,
    })
}

/// Random field supported on the dyadic block `j`. Errors when the block lies
/// entirely outside the lattice.
pub fn annulus_field(grid: Grid, j: DyadicIndex, rng: &mut ChaCha8Rng) -> Result<ComplexField> {
    if j.0 >= 1 && 2f64.powi(j.0 as i32 - 1) > grid.max_radius() {
        return Err(Error::Parameter(format!(
            "dyadic block {} lies outside the lattice (radius {:.2})",
            j.0,
            grid.max_radius()
        )));
    }
    let coeffs: Vec<Complex64> = (0..grid.len())
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect();
    let f = dyadic_project(&ComplexField::from_coeffs(grid, coeffs)?, j);
    let norm = f.l2_norm();
    if norm == 0.0 {
        return Err(Error::Parameter(format!(
            "dyadic block {} holds no lattice modes",
            j.0
        )));
    }
    Ok(f.scaled((1.0 / norm).into()))
}
