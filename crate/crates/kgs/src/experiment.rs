//! Experiment orchestration: runs each study from its config record and
//! persists CSV/JSON artifacts plus a run manifest.
//!
//! Determinism contract: identical config and seeds produce byte-identical
//! CSV bodies.  Wall-clock timestamps live in a dedicated manifest field so
//! the rest of the manifest is reproducible too.

use crate::config::{
    BilinearConfig, NormsConfig, SimulateConfig, SmoothingConfig, SplitConfig,
};
use crate::decomposition::{generate_rough_data, verify_split_scaling, RoughStyle};
use crate::driver::{smoothing_study, IntervalCtrl};
use crate::dyadic::DyadicIndex;
use crate::error::Result;
use crate::evolution::{kg_propagate, schrodinger_propagate, strang_step};
use crate::field::{ComplexField, RealField};
use crate::model::{energy, random_smooth_state, to_first_order, to_second_order};
use crate::probes::{bilinear_probe, fit_slope, xsb_norm, Dispersion, SpaceTimeField, Window};
use crate::snapshot::write_snapshot;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

/// Full-precision decimal rendering used in every CSV cell (17 significant
/// digits, '.' decimal separator), so downstream fits reproduce exactly.
pub fn csv_number(x: f64) -> String {
    format!("{x:.16e}")
}

/// Wall-clock metadata, isolated so the rest of the manifest is
/// deterministic for a given config.
#[derive(Debug, Clone, Serialize)]
pub struct Timestamps {
    /// Seconds since the Unix epoch at the start of the run.
    pub started: f64,
    /// Seconds since the Unix epoch when the manifest was written.
    pub finished: f64,
}

fn now_seconds() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Index of everything a run produced.  Every emitted file is listed here.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub subcommand: String,
    /// Materialized config with all defaults filled in.
    pub config: serde_json::Value,
    /// SHA-256 of the materialized config JSON.
    pub config_hash: String,
    pub package_version: String,
    /// All artifact files, relative to the output directory.
    pub files: Vec<String>,
    pub timestamps: Timestamps,
}

/// Collects artifacts for one run and writes the manifest at the end.
pub struct RunContext {
    out_dir: PathBuf,
    subcommand: String,
    config: serde_json::Value,
    files: Vec<String>,
    started: f64,
}

impl RunContext {
    pub fn new<C: Serialize>(out_dir: &Path, subcommand: &str, config: &C) -> Result<RunContext> {
        std::fs::create_dir_all(out_dir)?;
        Ok(RunContext {
            out_dir: out_dir.to_path_buf(),
            subcommand: subcommand.to_string(),
            config: serde_json::to_value(config)?,
            files: Vec::new(),
            started: now_seconds(),
        })
    }

    fn register(&mut self, name: &str) {
        self.files.push(name.to_string());
    }

    /// Write a CSV file; `rows` are pre-rendered with [`csv_number`].
    pub fn write_csv(&mut self, name: &str, header: &str, rows: &[String]) -> Result<()> {
        let mut body = String::with_capacity(rows.len() * 64 + header.len() + 2);
        body.push_str(header);
        body.push('\n');
        for row in rows {
            body.push_str(row);
            body.push('\n');
        }
        std::fs::write(self.out_dir.join(name), body)?;
        self.register(name);
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        std::fs::write(self.out_dir.join(name), text)?;
        self.register(name);
        Ok(())
    }

    pub fn write_field(&mut self, name: &str, field: &ComplexField, role: &str, provenance: &str) -> Result<()> {
        write_snapshot(&self.out_dir.join(name), field, role, provenance)?;
        self.register(name);
        self.register(&format!("{name}.json"));
        Ok(())
    }

    /// Write `manifest.json` and finish the run.
    pub fn finish(self) -> Result<Manifest> {
        let canonical = serde_json::to_string(&self.config)?;
        let hash = format!("{:x}", Sha256::digest(canonical.as_bytes()));
        let manifest = Manifest {
            subcommand: self.subcommand,
            config: self.config,
            config_hash: hash,
            package_version: env!("CARGO_PKG_VERSION").to_string(),
            files: self.files,
            timestamps: Timestamps {
                started: self.started,
                finished: now_seconds(),
            },
        };
        let text = serde_json::to_string_pretty(&manifest)?;
        std::fs::write(self.out_dir.join("manifest.json"), text)?;
        Ok(manifest)
    }
}

#[derive(Debug, Serialize)]
struct SimulateSummary {
    steps: usize,
    final_time: f64,
    mass_initial: f64,
    mass_final: f64,
    mass_drift_relative: f64,
    energy_initial: f64,
    energy_final: f64,
    energy_drift_relative: f64,
}

/// Nonlinear split-step run with conserved-quantity tracking and final
/// snapshots.
pub fn run_simulate(cfg: &SimulateConfig, out_dir: &Path) -> Result<Manifest> {
    cfg.validate()?;
    let mut ctx = RunContext::new(out_dir, "simulate", cfg)?;
    let grid = cfg.grid()?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = random_smooth_state(grid, &mut rng)?;
    state.psi = state.psi.scaled(cfg.amplitude.into());
    state.phi = RealField::from_complex(state.phi.as_complex().scaled(cfg.amplitude.into()))?;
    state.phi_t = RealField::from_complex(state.phi_t.as_complex().scaled(cfg.amplitude.into()))?;

    let steps = (cfg.horizon / cfg.step - 1e-9).ceil().max(1.0) as usize;
    let mut first = to_first_order(&state)?;
    let mut rows = Vec::new();
    let mut record = |s: &crate::model::FirstOrderState| -> Result<crate::model::ConservedQuantities> {
        let q = energy(&to_second_order(s)?)?;
        rows.push(format!(
            "{},{},{},{},{},{}",
            csv_number(q.time),
            csv_number(q.mass),
            csv_number(q.energy),
            csv_number(q.kinetic_psi),
            csv_number(q.kg_energy),
            csv_number(q.coupling_term)
        ));
        Ok(q)
    };
    let q0 = record(&first)?;
    let mut q_last = q0.clone();
    for i in 1..=steps {
        first = strang_step(&first, cfg.step, cfg.coupling)?;
        if i % cfg.sample_stride == 0 || i == steps {
            q_last = record(&first)?;
        }
    }
    ctx.write_csv(
        "timeseries.csv",
        "time,mass,energy,kinetic_psi,kg_energy,coupling_term",
        &rows,
    )?;

    let final_state = to_second_order(&first)?;
    let provenance = format!("split-step run to t = {}, seed {}", cfg.horizon, cfg.seed);
    ctx.write_field("psi_final.kgsf", &final_state.psi, "psi_final", &provenance)?;
    ctx.write_field("phi_final.kgsf", final_state.phi.as_complex(), "phi_final", &provenance)?;
    ctx.write_field("phi_t_final.kgsf", final_state.phi_t.as_complex(), "phi_t_final", &provenance)?;

    let mass_scale = q0.mass.abs().max(1e-300);
    let energy_scale = q0.energy.abs().max(1e-300);
    ctx.write_json(
        "summary.json",
        &SimulateSummary {
            steps,
            final_time: first.time,
            mass_initial: q0.mass,
            mass_final: q_last.mass,
            mass_drift_relative: (q_last.mass - q0.mass).abs() / mass_scale,
            energy_initial: q0.energy,
            energy_final: q_last.energy,
            energy_drift_relative: (q_last.energy - q0.energy).abs() / energy_scale,
        },
    )?;
    ctx.finish()
}

#[derive(Debug, Serialize)]
struct SplitSummary {
    expected_low_slope: f64,
    expected_high_slope: f64,
    mean_low_slope: f64,
    mean_high_slope: f64,
    per_seed_low: Vec<f64>,
    per_seed_high: Vec<f64>,
}

/// Low/high splitting norm-scaling sweep over seeds and cutoffs.
pub fn run_split(cfg: &SplitConfig, out_dir: &Path) -> Result<Manifest> {
    cfg.validate()?;
    let mut ctx = RunContext::new(out_dir, "split", cfg)?;
    let grid = cfg.grid()?;

    let mut rows = Vec::new();
    let mut low_slopes = Vec::new();
    let mut high_slopes = Vec::new();
    let mut expected = (0.0, 0.0);
    for &seed in &cfg.seeds {
        let f = generate_rough_data(grid, cfg.s, seed, RoughStyle::Random)?;
        // The low part's growth is informative in H^l (l >= s); the high
        // part's decay is informative in L2, so measure each in its own norm.
        let low = verify_split_scaling(&f, cfg.s, cfg.l, &cfg.cutoffs)?;
        let high = verify_split_scaling(&f, cfg.s, 0.0, &cfg.cutoffs)?;
        for (row_low, row_high) in low.rows.iter().zip(&high.rows) {
            rows.push(format!(
                "{seed},{},{},{}",
                csv_number(row_low.n_cut),
                csv_number(row_low.norm_low),
                csv_number(row_high.norm_high)
            ));
        }
        low_slopes.push(low.slope_low.slope);
        high_slopes.push(high.slope_high.slope);
        expected = (low.expected_slope, -cfg.s);
    }
    ctx.write_csv("split.csv", "seed,n_cut,norm_low_h_l,norm_high_l2", &rows)?;

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    ctx.write_json(
        "summary.json",
        &SplitSummary {
            expected_low_slope: expected.0,
            expected_high_slope: expected.1,
            mean_low_slope: mean(&low_slopes),
            mean_high_slope: mean(&high_slopes),
            per_seed_low: low_slopes,
            per_seed_high: high_slopes,
        },
    )?;
    ctx.finish()
}

/// One smoothing interval per (cutoff, seed) cell; slopes of the nonlinear
/// remainder norms against the cutoff.
pub fn run_smoothing_study(cfg: &SmoothingConfig, out_dir: &Path) -> Result<Manifest> {
    cfg.validate()?;
    let mut ctx = RunContext::new(out_dir, "smoothing-study", cfg)?;
    let grid = cfg.grid()?;
    let ctrl = IntervalCtrl {
        substeps: cfg.substeps,
        picard_tol: cfg.picard_tol,
        picard_max_iters: cfg.picard_max_iters,
        coupling: true,
    };
    let study = smoothing_study(
        grid,
        cfg.s,
        cfg.m,
        cfg.delta,
        &cfg.cutoffs,
        &cfg.seeds,
        RoughStyle::Random,
        &ctrl,
    )?;

    let mut rows = Vec::new();
    for cell in &study.cells {
        let r = &cell.record;
        rows.push(format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            csv_number(cell.n_cut),
            cell.seed,
            csv_number(cell.interval),
            csv_number(r.w_h1),
            csv_number(r.w_l2),
            csv_number(r.z_h1),
            csv_number(r.z_l2),
            csv_number(r.rough_h1_free),
            csv_number(cell.ratio),
            csv_number(r.mass_increment),
            csv_number(r.energy_increment)
        ));
    }
    ctx.write_csv(
        "cells.csv",
        "n_cut,seed,interval,w_h1,w_l2,z_h1,z_l2,rough_h1_free,ratio,mass_increment,energy_increment",
        &rows,
    )?;

    let agg: Vec<String> = study
        .by_cutoff
        .iter()
        .map(|&(n_cut, w_h1, w_l2, z_h1, ratio)| {
            format!(
                "{},{},{},{},{}",
                csv_number(n_cut),
                csv_number(w_h1),
                csv_number(w_l2),
                csv_number(z_h1),
                csv_number(ratio)
            )
        })
        .collect();
    ctx.write_csv("by_cutoff.csv", "n_cut,w_h1,w_l2,z_h1,ratio", &agg)?;
    ctx.write_json("study.json", &study)?;
    ctx.finish()
}

#[derive(Debug, Serialize)]
struct BilinearSlope {
    m: u32,
    /// Fitted slope of log2(geometric-mean ratio) against l over cells with
    /// l >= m.
    ratio_slope: f64,
    bound_factor_slope: f64,
    r2: f64,
}

#[derive(Debug, Serialize)]
struct BilinearSummary {
    slopes: Vec<BilinearSlope>,
}

/// Deterministic per-cell random stream.
fn cell_seed(base: u64, l: u32, m: u32) -> u64 {
    base.wrapping_mul(1_000_003)
        .wrapping_add((l as u64) << 32)
        .wrapping_add(m as u64)
}

/// Dyadic bilinear product-norm sweep over (l, m, seed) cells.
pub fn run_bilinear_probe(cfg: &BilinearConfig, out_dir: &Path) -> Result<Manifest> {
    cfg.validate()?;
    let mut ctx = RunContext::new(out_dir, "bilinear-probe", cfg)?;
    let grid = cfg.grid()?;

    let mut rows = Vec::new();
    // geometric means over seeds per (l, m)
    let mut means: Vec<(u32, u32, f64, f64)> = Vec::new();
    for &m in &cfg.m_values {
        for &l in &cfg.l_values {
            let mut log_ratio = 0.0;
            let mut log_bound = 0.0;
            for &seed in &cfg.seeds {
                let p = bilinear_probe(
                    grid,
                    DyadicIndex(l),
                    DyadicIndex(m),
                    cfg.sign.into(),
                    cfg.window,
                    cfg.samples,
                    cell_seed(seed, l, m),
                )?;
                rows.push(format!(
                    "{l},{m},{seed},{},{}",
                    csv_number(p.ratio),
                    csv_number(p.bound_factor)
                ));
                log_ratio += p.ratio.max(1e-300).ln();
                log_bound += p.bound_factor.max(1e-300).ln();
            }
            let k = cfg.seeds.len() as f64;
            means.push((l, m, (log_ratio / k).exp(), (log_bound / k).exp()));
        }
    }
    ctx.write_csv("probe.csv", "l,m,seed,ratio,bound_factor", &rows)?;

    // Slope fits are restricted to cells with l >= m, where the dyadic
    // product bound is informative; all cells are still reported above.
    let mut slopes = Vec::new();
    for &m in &cfg.m_values {
        let pts_ratio: Vec<(f64, f64)> = means
            .iter()
            .filter(|&&(l, mm, _, _)| mm == m && l >= m)
            .map(|&(l, _, r, _)| (2f64.powi(l as i32), r))
            .collect();
        let pts_bound: Vec<(f64, f64)> = means
            .iter()
            .filter(|&&(l, mm, _, _)| mm == m && l >= m)
            .map(|&(l, _, _, b)| (2f64.powi(l as i32), b))
            .collect();
        if pts_ratio.len() < 3 {
            continue;
        }
        let fr = fit_slope(&pts_ratio)?;
        let fb = fit_slope(&pts_bound)?;
        slopes.push(BilinearSlope {
            m,
            ratio_slope: fr.slope,
            bound_factor_slope: fb.slope,
            r2: fr.r2,
        });
    }
    ctx.write_json("summary.json", &BilinearSummary { slopes })?;
    ctx.finish()
}

/// Space-time norms of one free trajectory under a sweep of weights.
pub fn run_norms(cfg: &NormsConfig, out_dir: &Path) -> Result<Manifest> {
    cfg.validate()?;
    let mut ctx = RunContext::new(out_dir, "norms", cfg)?;
    let grid = cfg.grid()?;

    let data = generate_rough_data(grid, 1.0, cfg.seed, RoughStyle::Random)?;
    let evolve = |t: f64| -> Result<ComplexField> {
        Ok(match Dispersion::from(cfg.evolution) {
            Dispersion::Schrodinger => schrodinger_propagate(&data, t),
            Dispersion::KgPlus => kg_propagate(&data, t, crate::evolution::Sign::Plus),
            Dispersion::KgMinus => kg_propagate(&data, t, crate::evolution::Sign::Minus),
        })
    };
    let field = SpaceTimeField::sample(cfg.window, cfg.samples, Window::Hann, evolve)?;

    let mut rows = Vec::new();
    for &s in &cfg.s_values {
        for &b in &cfg.b_values {
            for &disp in &cfg.dispersions {
                let value = xsb_norm(&field, s, b, disp.into())?;
                let label = serde_json::to_value(disp)?;
                rows.push(format!(
                    "{},{},{},{}",
                    csv_number(s),
                    csv_number(b),
                    label.as_str().unwrap_or("unknown"),
                    csv_number(value)
                ));
            }
        }
    }
    ctx.write_csv("norms.csv", "s,b,dispersion,value", &rows)?;
    ctx.finish()
}
