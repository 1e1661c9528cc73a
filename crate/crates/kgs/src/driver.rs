//! Interval-by-interval construction of rough-data solutions: evolve the
//! regular (low-frequency) part, solve the rough part by Duhamel/Picard,
//! extract the smoother inhomogeneous parts `w` and `z_pm`, recombine the
//! data at the interval end, and keep a mass/energy increment ledger.

use crate::decomposition::{
    generate_rough_data, generate_rough_real, generate_rough_velocity, split_data,
    RegularityParams, RoughStyle,
};
use crate::duhamel::duhamel_endpoint;
use crate::error::{Error, Result};
use crate::evolution::{free_flow, oracle_trajectory, StepControl};
use crate::field::{triple_quadrature, ComplexField, RealField};
use crate::grid::Grid;
use crate::model::{
    coupling_integral, energy, mass, to_first_order, to_second_order, FirstOrderState,
    SecondOrderState,
};
use crate::multiplier::{a_pow, gradient_norm, laplacian};
use crate::probes::{fit_slope, SlopeFit};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Interval schedule for a rough-data run: the admissible interval length
/// shrinks with the splitting cutoff as `N^{-(4/3)(1 - s^m) - delta}` (capped
/// at 1), and `count` intervals of that length cover the horizon.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IntervalPlan {
    pub length: f64,
    pub count: usize,
    pub params: RegularityParams,
    pub horizon: f64,
}

/// `min(1, N^{-(4/3)(1 - min(s, m)) - delta})`.
pub fn interval_length(params: &RegularityParams) -> f64 {
    let exponent = -(4.0 / 3.0) * (1.0 - params.s_min()) - params.delta;
    params.n_cut.powf(exponent).min(1.0)
}

pub fn plan_intervals(params: &RegularityParams, horizon: f64) -> Result<IntervalPlan> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Parameter(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let length = interval_length(params);
    let count = (horizon / length - 1e-12).ceil().max(1.0) as usize;
    Ok(IntervalPlan {
        length,
        count,
        params: *params,
        horizon,
    })
}

/// Per-interval ledger entry. All norms are evaluated at the interval end;
/// the increments compare the recombined regular data `(psi + w, phi + z,
/// phi_t + z')` against the plain regular solution at the same time, where
/// `z = (z_plus + z_minus)/2` and `z' = -(i/2) A^{1/2} (z_plus - z_minus)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub index: usize,
    /// Mass of the recombined regular matter field.
    pub mass_regular: f64,
    /// Energy of the recombined regular state.
    pub energy_regular: f64,
    pub w_h1: f64,
    pub w_l2: f64,
    pub z_h1: f64,
    pub z_l2: f64,
    /// `| ||psi + w|| - ||psi|| |`, bounded by `||w||_{L^2}`.
    pub mass_increment: f64,
    /// Signed energy change of the regular state under recombination,
    /// accumulated term by term (gradient cross terms, the two
    /// Klein-Gordon cross terms, and the two coupling integrals).
    pub energy_increment: f64,
    /// `H^1` norm of the freely evolved rough matter part.
    pub rough_h1_free: f64,
}

/// Discretization parameters for one interval solve.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IntervalCtrl {
    /// Quadrature subintervals per interval (nodes = substeps + 1).
    pub substeps: usize,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    /// With coupling off every part evolves freely and the increments vanish.
    pub coupling: bool,
}

impl Default for IntervalCtrl {
    fn default() -> IntervalCtrl {
        IntervalCtrl {
            substeps: 32,
            picard_tol: 1e-10,
            picard_max_iters: 50,
            coupling: true,
        }
    }
}

impl IntervalCtrl {
    pub fn step_control(&self, length: f64) -> Result<StepControl> {
        if self.substeps < 2 {
            return Err(Error::Parameter(format!(
                "need at least 2 substeps per interval, got {}",
                self.substeps
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Parameter(format!(
                "interval length must be positive, got {length}"
            )));
        }
        let mut ctrl = StepControl::new(length / self.substeps as f64, length)?;
        ctrl.picard_tol = self.picard_tol;
        ctrl.picard_max_iters = self.picard_max_iters;
        ctrl.validate()?;
        Ok(ctrl)
    }
}

/// Signed term-by-term energy change when the regular state absorbs the
/// inhomogeneous parts: gradient cross terms, the two Klein-Gordon cross
/// terms, and the two coupling integrals. Shares its quadrature with the
/// energy functional, so it matches a direct energy difference to roundoff.
fn energy_expansion(
    reg_end: &SecondOrderState,
    w: &ComplexField,
    z: &RealField,
    z_prime: &RealField,
) -> Result<f64> {
    let psi_new = reg_end.psi.add(w)?;
    // 2 Re <grad psi, grad w> + ||grad w||^2, with <grad a, grad b> written
    // through the (negative) Laplacian.
    let grad_cross = -2.0 * reg_end.psi.inner(&laplacian(w)?).re;
    let grad_term = grad_cross + gradient_norm(w).powi(2);
    let a_phi = a_pow(reg_end.phi.as_complex(), 0.5)?;
    let a_z = a_pow(z.as_complex(), 0.5)?;
    let kg_phi = 0.5 * (2.0 * a_phi.inner(&a_z).re + a_z.l2_norm().powi(2));
    let kg_phi_t = 0.5
        * (2.0 * reg_end.phi_t.as_complex().inner(z_prime.as_complex()).re
            + z_prime.l2_norm().powi(2));
    let coupling_z = triple_quadrature(&psi_new, &psi_new.conjugated(), z.as_complex())?.re;
    let coupling_phi = coupling_integral(&psi_new, reg_end.phi.as_complex())?
        - coupling_integral(&reg_end.psi, reg_end.phi.as_complex())?;
    Ok(grad_term + kg_phi + kg_phi_t - coupling_z - coupling_phi)
}

/// Runs one interval of length `length`: the regular part is integrated with
/// the integrating-factor RK4 scheme (its trajectory is the context for the
/// trapezoid quadrature, so the fourth-order scheme keeps the context error
/// below the quadrature error), the rough part is solved by Picard on the
/// Duhamel equations, and the interval-end data are recombined as
/// `(psi + w, phi_plus + z_plus, phi_minus + z_minus)`. The rough part
/// carried to the next interval is the free evolution of the incoming rough
/// data.
pub fn run_interval(
    regular0: &FirstOrderState,
    rough0: &FirstOrderState,
    length: f64,
    ctrl: &IntervalCtrl,
) -> Result<(FirstOrderState, FirstOrderState, IntervalRecord)> {
    if regular0.grid() != rough0.grid() {
        return Err(Error::GridMismatch);
    }
    let sc = ctrl.step_control(length)?;

    if !ctrl.coupling {
        // Linear flow: both parts evolve freely and nothing is exchanged.
        let regular1 = free_flow(regular0, length);
        let rough1 = free_flow(rough0, length);
        let so = to_second_order(&regular1)?;
        let q = energy(&so)?;
        let record = IntervalRecord {
            index: 0,
            mass_regular: q.mass,
            energy_regular: q.energy,
            w_h1: 0.0,
            w_l2: 0.0,
            z_h1: 0.0,
            z_l2: 0.0,
            mass_increment: 0.0,
            energy_increment: 0.0,
            rough_h1_free: rough1.psi.sobolev_norm(1.0)?,
        };
        return Ok((regular1, rough1, record));
    }

    let context = oracle_trajectory(regular0, &sc, true)?;
    let end = duhamel_endpoint(&rough0.psi, &rough0.phi_plus, &rough0.phi_minus, &context, &sc)?;
    let regular_end = context.last().expect("trajectory holds at least one node");
    let reg_end_so = to_second_order(regular_end)?;

    let regular1 = FirstOrderState {
        psi: regular_end.psi.add(&end.w)?,
        phi_plus: regular_end.phi_plus.add(&end.z_plus)?,
        phi_minus: regular_end.phi_minus.add(&end.z_minus)?,
        time: regular0.time + length,
    };
    let mut rough1 = free_flow(rough0, length);
    rough1.time = rough0.time + length;

    let z = RealField::symmetrized(&end.z_plus.add(&end.z_minus)?.scaled(0.5.into()));
    let z_prime = RealField::symmetrized(
        &a_pow(&end.z_plus.sub(&end.z_minus)?, 0.5)?.scaled(-0.5 * Complex64::i()),
    );

    let new_so = to_second_order(&regular1)?;
    let q_new = energy(&new_so)?;
    let record = IntervalRecord {
        index: 0,
        mass_regular: q_new.mass,
        energy_regular: q_new.energy,
        w_h1: end.w.sobolev_norm(1.0)?,
        w_l2: end.w.l2_norm(),
        z_h1: z.sobolev_norm(1.0)?,
        z_l2: z.l2_norm(),
        mass_increment: (mass(&regular1.psi) - mass(&regular_end.psi)).abs(),
        energy_increment: energy_expansion(&reg_end_so, &end.w, &z, &z_prime)?,
        rough_h1_free: rough1.psi.sobolev_norm(1.0)?,
    };
    Ok((regular1, rough1, record))
}

/// Full ledger of an interval iteration.
#[derive(Debug, Clone, Serialize)]
pub struct IterationLedger {
    pub plan: IntervalPlan,
    pub records: Vec<IntervalRecord>,
    /// Interval lengths at which the Picard solver failed to contract; each
    /// failure halves the working length (at most 3 times).
    pub halvings: Vec<f64>,
    pub aborted: Option<String>,
}

/// Result of a global rough-data run: the ledger plus the reconstructed
/// second-order state (regular + rough) at the reached time.
#[derive(Debug, Clone)]
pub struct GlobalRun {
    pub ledger: IterationLedger,
    pub final_state: Option<SecondOrderState>,
    /// Time actually reached; `count * length >= horizon` when not aborted.
    pub final_time: f64,
}

/// Splits the data at `params.n_cut`, plans the interval schedule, and runs
/// the intervals in sequence, carrying the regular and rough parts forward.
/// A non-contracting interval halves the working length (at most 3 times,
/// each recorded); further failures abort with the reason in the ledger.
pub fn run_global(
    psi0: &ComplexField,
    phi0: &RealField,
    phi1: &RealField,
    params: RegularityParams,
    horizon: f64,
    ctrl: &IntervalCtrl,
) -> Result<GlobalRun> {
    let split = split_data(psi0, phi0, phi1, params)?;
    let mut regular = to_first_order(&SecondOrderState::new(
        split.psi01, split.phi01, split.phi11, 0.0,
    )?)?;
    let mut rough = to_first_order(&SecondOrderState::new(
        split.psi02, split.phi02, split.phi12, 0.0,
    )?)?;
    let plan = plan_intervals(&params, horizon)?;

    let mut records = Vec::new();
    let mut halvings = Vec::new();
    let mut aborted = None;
    let mut length = plan.length;
    let mut elapsed = 0.0;
    while elapsed < horizon - 1e-12 * horizon.max(1.0) {
        match run_interval(&regular, &rough, length, ctrl) {
            Ok((reg1, rough1, mut record)) => {
                record.index = records.len();
                records.push(record);
                regular = reg1;
                rough = rough1;
                elapsed += length;
            }
            Err(Error::IntervalTooLong { .. }) if halvings.len() < 3 => {
                halvings.push(length);
                length *= 0.5;
            }
            Err(e) => {
                aborted = Some(e.to_string());
                break;
            }
        }
    }

    let final_time = regular.time;
    let sum = FirstOrderState {
        psi: regular.psi.add(&rough.psi)?,
        phi_plus: regular.phi_plus.add(&rough.phi_plus)?,
        phi_minus: regular.phi_minus.add(&rough.phi_minus)?,
        time: final_time,
    };
    let final_state = match to_second_order(&sum) {
        Ok(s) => Some(s),
        Err(e) => {
            if aborted.is_none() {
                aborted = Some(format!("final reconstruction failed: {e}"));
            }
            None
        }
    };
    Ok(GlobalRun {
        ledger: IterationLedger {
            plan,
            records,
            halvings,
            aborted,
        },
        final_state,
        final_time,
    })
}

/// One `(cutoff, seed)` cell of the smoothing measurement.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SmoothingCell {
    pub n_cut: f64,
    pub seed: u64,
    pub interval: f64,
    pub record: IntervalRecord,
    /// `||w||_{H^1} / ||free rough||_{H^1}`, the smoothing gain of the
    /// inhomogeneous part over the linear part.
    pub ratio: f64,
}

/// A cell skipped because its solver failed; the study continues without it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkippedCell {
    pub n_cut: f64,
    pub seed: u64,
    pub reason: String,
}

/// Smoothing exponents measured over a cutoff sweep, with the predicted
/// rates `5/6 - (4/3) s^m` for `w` in `H^1`, `2/3 - (5/3) s^m` for `w` in
/// `L^2` and `-1/3 - s^m (2/3 - 1/(2s))` for `z` in `H^1`.
#[derive(Debug, Clone, Serialize)]
pub struct SmoothingStudy {
    pub s: f64,
    pub m: f64,
    pub delta: f64,
    pub cells: Vec<SmoothingCell>,
    pub skipped: Vec<SkippedCell>,
    /// Per-cutoff geometric means over seeds: `(N, w_h1, w_l2, z_h1, ratio)`.
    pub by_cutoff: Vec<(f64, f64, f64, f64, f64)>,
    pub slope_w_h1: SlopeFit,
    pub slope_w_l2: SlopeFit,
    pub slope_z_h1: SlopeFit,
    pub predicted_w_h1: f64,
    pub predicted_w_l2: f64,
    pub predicted_z_h1: f64,
}

/// Predicted smoothing exponents at regularity `(s, m)`.
pub fn predicted_exponents(s: f64, m: f64) -> (f64, f64, f64) {
    let sm = s.min(m);
    (
        5.0 / 6.0 - 4.0 / 3.0 * sm,
        2.0 / 3.0 - 5.0 / 3.0 * sm,
        -1.0 / 3.0 - sm * (2.0 / 3.0 - 1.0 / (2.0 * s)),
    )
}

/// Runs one interval per `(cutoff, seed)` cell on freshly generated rough
/// data of regularity `(s, m, m-1)` and fits the decay of the inhomogeneous
/// parts against the cutoff. Seeds are averaged geometrically; failed cells
/// are skipped and recorded.
pub fn smoothing_study(
    grid: Grid,
    s: f64,
    m: f64,
    delta: f64,
    sweep: &[f64],
    seeds: &[u64],
    style: RoughStyle,
    ctrl: &IntervalCtrl,
) -> Result<SmoothingStudy> {
    if sweep.len() < 3 {
        return Err(Error::DegenerateSweep(format!(
            "need at least 3 cutoffs, got {}",
            sweep.len()
        )));
    }
    if sweep.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::DegenerateSweep(
            "cutoffs must be strictly increasing".into(),
        ));
    }
    if seeds.is_empty() {
        return Err(Error::Parameter("need at least one seed".into()));
    }

    let mut cells = Vec::new();
    let mut skipped = Vec::new();
    let mut by_cutoff = Vec::new();
    let mut pts_w_h1 = Vec::new();
    let mut pts_w_l2 = Vec::new();
    let mut pts_z_h1 = Vec::new();
    for &n_cut in sweep {
        let params = RegularityParams::new(s, m, n_cut, delta)?;
        let length = interval_length(&params);
        let mut logs = [0.0f64; 4];
        let mut survived = 0usize;
        for &seed in seeds {
            let cell = (|| -> Result<SmoothingCell> {
                let base = seed.wrapping_mul(3);
                let psi0 = generate_rough_data(grid, s, base, style)?;
                let phi0 = generate_rough_real(grid, m, base.wrapping_add(1), style)?;
                let phi1 = generate_rough_velocity(grid, m, base.wrapping_add(2), style)?;
                let split = split_data(&psi0, &phi0, &phi1, params)?;
                let regular = to_first_order(&SecondOrderState::new(
                    split.psi01, split.phi01, split.phi11, 0.0,
                )?)?;
                let rough = to_first_order(&SecondOrderState::new(
                    split.psi02, split.phi02, split.phi12, 0.0,
                )?)?;
                let (_, _, record) = run_interval(&regular, &rough, length, ctrl)?;
                if record.rough_h1_free <= 0.0 {
                    return Err(Error::DegenerateSweep(format!(
                        "rough part above cutoff {n_cut} is empty on this grid"
                    )));
                }
                Ok(SmoothingCell {
                    n_cut,
                    seed,
                    interval: length,
                    record,
                    ratio: record.w_h1 / record.rough_h1_free,
                })
            })();
            match cell {
                Ok(c) => {
                    logs[0] += c.record.w_h1.max(1e-300).ln();
                    logs[1] += c.record.w_l2.max(1e-300).ln();
                    logs[2] += c.record.z_h1.max(1e-300).ln();
                    logs[3] += c.ratio.max(1e-300).ln();
                    survived += 1;
                    cells.push(c);
                }
                Err(e) => skipped.push(SkippedCell {
                    n_cut,
                    seed,
                    reason: e.to_string(),
                }),
            }
        }
        if survived > 0 {
            let geo = |acc: f64| (acc / survived as f64).exp();
            let row = (
                n_cut,
                geo(logs[0]),
                geo(logs[1]),
                geo(logs[2]),
                geo(logs[3]),
            );
            by_cutoff.push(row);
            pts_w_h1.push((n_cut, row.1));
            pts_w_l2.push((n_cut, row.2));
            pts_z_h1.push((n_cut, row.3));
        }
    }
    let (predicted_w_h1, predicted_w_l2, predicted_z_h1) = predicted_exponents(s, m);
    Ok(SmoothingStudy {
        s,
        m,
        delta,
        cells,
        skipped,
        by_cutoff,
        slope_w_h1: fit_slope(&pts_w_h1)?,
        slope_w_l2: fit_slope(&pts_w_l2)?,
        slope_z_h1: fit_slope(&pts_z_h1)?,
        predicted_w_h1,
        predicted_w_l2,
        predicted_z_h1,
    })
}
