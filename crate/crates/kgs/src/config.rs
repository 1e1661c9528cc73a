//! Experiment configuration records.
//!
//! One JSON file per run; every field has a default, and the materialized
//! record (defaults filled in) is echoed into the run manifest so runs are
//! self-describing.  Validation happens before any computation starts and
//! maps to the configuration-error exit code.

use crate::error::{Error, Result};
use crate::evolution::Sign;
use crate::grid::Grid;
use crate::probes::Dispersion;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

fn default_dim() -> usize {
    3
}
fn default_n_simulate() -> usize {
    16
}
fn default_n_sweep() -> usize {
    64
}
fn default_length() -> f64 {
    2.0 * PI
}
fn default_true() -> bool {
    true
}
fn default_one() -> f64 {
    1.0
}
fn default_horizon() -> f64 {
    1.0
}
fn default_step() -> f64 {
    1e-3
}
fn default_stride() -> usize {
    10
}
fn default_s() -> f64 {
    0.75
}
fn default_delta() -> f64 {
    0.05
}
fn default_cutoffs() -> Vec<f64> {
    vec![4.0, 8.0, 16.0, 32.0]
}
fn default_seeds() -> Vec<u64> {
    (0..8).collect()
}
fn default_substeps() -> usize {
    32
}
fn default_picard_tol() -> f64 {
    1e-10
}
fn default_picard_iters() -> usize {
    50
}
fn default_window() -> f64 {
    8.0
}
fn default_samples() -> usize {
    24
}
fn default_l_values() -> Vec<u32> {
    vec![3, 4, 5]
}
fn default_m_values() -> Vec<u32> {
    vec![2]
}
fn default_sign() -> SignChoice {
    SignChoice::Minus
}
fn default_s_values() -> Vec<f64> {
    vec![0.0, 0.5, 1.0]
}
fn default_b_values() -> Vec<f64> {
    vec![0.0, 0.5, 1.0]
}
fn default_dispersions() -> Vec<DispersionChoice> {
    vec![
        DispersionChoice::Schrodinger,
        DispersionChoice::KgPlus,
        DispersionChoice::KgMinus,
    ]
}

/// Serializable stand-in for the half-wave sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignChoice {
    Plus,
    Minus,
}

impl From<SignChoice> for Sign {
    fn from(c: SignChoice) -> Sign {
        match c {
            SignChoice::Plus => Sign::Plus,
            SignChoice::Minus => Sign::Minus,
        }
    }
}

/// Serializable stand-in for the dispersion relation choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DispersionChoice {
    Schrodinger,
    KgPlus,
    KgMinus,
}

impl From<DispersionChoice> for Dispersion {
    fn from(c: DispersionChoice) -> Dispersion {
        match c {
            DispersionChoice::Schrodinger => Dispersion::Schrodinger,
            DispersionChoice::KgPlus => Dispersion::KgPlus,
            DispersionChoice::KgMinus => Dispersion::KgMinus,
        }
    }
}

/// Full nonlinear evolution with conserved-quantity tracking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub dim: usize,
    pub n: usize,
    pub length: f64,
    /// Final time of the run.
    pub horizon: f64,
    /// Splitting step size.
    pub step: f64,
    pub coupling: bool,
    /// Scale applied to the random smooth data; 0 gives identically zero data.
    pub amplitude: f64,
    /// Conserved quantities are recorded every this many steps.
    pub sample_stride: usize,
    pub seed: u64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            dim: default_dim(),
            n: default_n_simulate(),
            length: default_length(),
            horizon: default_horizon(),
            step: default_step(),
            coupling: default_true(),
            amplitude: default_one(),
            sample_stride: default_stride(),
            seed: 0,
        }
    }
}

impl SimulateConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.dim, self.n, self.length)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Parameter(format!("horizon must be positive, got {}", self.horizon)));
        }
        if !(self.step > 0.0 && self.step <= self.horizon) {
            return Err(Error::Parameter(format!(
                "step must lie in (0, horizon], got {}",
                self.step
            )));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::Parameter(format!(
                "amplitude must be a finite nonnegative number, got {}",
                self.amplitude
            )));
        }
        if self.sample_stride == 0 {
            return Err(Error::Parameter("sample_stride must be at least 1".into()));
        }
        Ok(())
    }
}

/// Low/high frequency splitting scaling measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitConfig {
    pub dim: usize,
    pub n: usize,
    /// Regularity of the generated rough data.
    pub s: f64,
    /// Target regularity the low part is rescaled to.
    pub l: f64,
    /// Frequency cutoffs swept over.
    pub cutoffs: Vec<f64>,
    pub seeds: Vec<u64>,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            dim: default_dim(),
            n: default_n_sweep(),
            s: default_s(),
            l: 1.0,
            cutoffs: default_cutoffs(),
            seeds: default_seeds(),
        }
    }
}

impl SplitConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::standard(self.dim, self.n)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        if self.cutoffs.len() < 3 {
            return Err(Error::DegenerateSweep(format!(
                "need at least 3 cutoffs, got {}",
                self.cutoffs.len()
            )));
        }
        if self.seeds.is_empty() {
            return Err(Error::DegenerateSweep("need at least 1 seed".into()));
        }
        Ok(())
    }
}

/// Low/high splitting plus one smoothing interval per cutoff and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SmoothingConfig {
    pub dim: usize,
    pub n: usize,
    /// Schrodinger-part regularity.
    pub s: f64,
    /// Wave-part regularity.
    pub m: f64,
    /// Extra shrink exponent in the interval-length rule.
    pub delta: f64,
    pub cutoffs: Vec<f64>,
    pub seeds: Vec<u64>,
    /// Quadrature nodes per interval in the integral-equation solve.
    pub substeps: usize,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        SmoothingConfig {
            dim: default_dim(),
            n: default_n_sweep(),
            s: default_s(),
            m: default_s(),
            delta: default_delta(),
            cutoffs: default_cutoffs(),
            seeds: (0..4).collect(),
            substeps: default_substeps(),
            picard_tol: default_picard_tol(),
            picard_max_iters: default_picard_iters(),
        }
    }
}

impl SmoothingConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::standard(self.dim, self.n)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        if self.cutoffs.len() < 3 {
            return Err(Error::DegenerateSweep(format!(
                "need at least 3 cutoffs, got {}",
                self.cutoffs.len()
            )));
        }
        if self.seeds.is_empty() {
            return Err(Error::DegenerateSweep("need at least 1 seed".into()));
        }
        if self.substeps < 2 {
            return Err(Error::Parameter("substeps must be at least 2".into()));
        }
        if !(self.picard_tol > 0.0) {
            return Err(Error::Parameter("picard_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Dyadic bilinear product-norm probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BilinearConfig {
    pub dim: usize,
    pub n: usize,
    /// Length of the time window.
    pub window: f64,
    /// Time samples across the window.
    pub samples: usize,
    /// Half-wave sign of the second factor.
    pub sign: SignChoice,
    /// Dyadic blocks of the Schrodinger factor.
    pub l_values: Vec<u32>,
    /// Dyadic blocks of the half-wave factor.
    pub m_values: Vec<u32>,
    pub seeds: Vec<u64>,
}

impl Default for BilinearConfig {
    fn default() -> Self {
        BilinearConfig {
            dim: default_dim(),
            n: default_n_sweep(),
            window: default_window(),
            samples: default_samples(),
            sign: default_sign(),
            l_values: default_l_values(),
            m_values: default_m_values(),
            seeds: (0..4).collect(),
        }
    }
}

impl BilinearConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::standard(self.dim, self.n)
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        if self.samples < 8 {
            return Err(Error::Parameter(format!(
                "need at least 8 time samples, got {}",
                self.samples
            )));
        }
        if !(self.window > 0.0 && self.window.is_finite()) {
            return Err(Error::Parameter(format!("window must be positive, got {}", self.window)));
        }
        if self.l_values.is_empty() || self.m_values.is_empty() || self.seeds.is_empty() {
            return Err(Error::DegenerateSweep(
                "l_values, m_values and seeds must all be nonempty".into(),
            ));
        }
        for &j in self.l_values.iter().chain(&self.m_values) {
            // mirrors the annulus generator: the block must intersect the lattice
            if j >= 1 && 2f64.powi(j as i32 - 1) > grid.max_radius() {
                return Err(Error::Parameter(format!(
                    "dyadic block {j} exceeds the lattice radius {:.1}",
                    grid.max_radius()
                )));
            }
        }
        Ok(())
    }
}

/// Space-time norms of free evolutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NormsConfig {
    pub dim: usize,
    pub n: usize,
    pub window: f64,
    pub samples: usize,
    /// Dispersion relation used to *generate* the free trajectory.
    pub evolution: DispersionChoice,
    /// Spatial regularity weights evaluated.
    pub s_values: Vec<f64>,
    /// Temporal concentration weights evaluated.
    pub b_values: Vec<f64>,
    /// Dispersion relations the norm is measured against.
    pub dispersions: Vec<DispersionChoice>,
    pub seed: u64,
}

impl Default for NormsConfig {
    fn default() -> Self {
        NormsConfig {
            dim: default_dim(),
            n: 16,
            window: default_window(),
            samples: default_samples(),
            evolution: DispersionChoice::Schrodinger,
            s_values: default_s_values(),
            b_values: default_b_values(),
            dispersions: default_dispersions(),
            seed: 0,
        }
    }
}

impl NormsConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::standard(self.dim, self.n)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        if self.samples < 8 {
            return Err(Error::Parameter(format!(
                "need at least 8 time samples, got {}",
                self.samples
            )));
        }
        if !(self.window > 0.0 && self.window.is_finite()) {
            return Err(Error::Parameter(format!("window must be positive, got {}", self.window)));
        }
        if self.s_values.is_empty() || self.b_values.is_empty() || self.dispersions.is_empty() {
            return Err(Error::DegenerateSweep(
                "s_values, b_values and dispersions must all be nonempty".into(),
            ));
        }
        Ok(())
    }
}

/// Parse a config file, treating malformed JSON as a configuration error.
pub fn load_config<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
