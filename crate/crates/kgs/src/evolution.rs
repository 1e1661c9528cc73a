//! Time integration: exact linear propagators, a Strang-split scheme whose
//! substeps are exactly solvable, and an integrating-factor RK4 oracle.

use crate::error::{Error, Result};
use crate::field::{collocation_abs_squared, collocation_product, ComplexField};
use crate::model::FirstOrderState;
use crate::multiplier::a_pow;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Which meson branch a propagator acts on: `Plus` rotates by `e^{-it<k>}`,
/// `Minus` by `e^{+it<k>}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => -1.0,
            Sign::Minus => 1.0,
        }
    }
}

/// Free Schrodinger flow: `ghat(k) = e^{-it|k|^2} fhat(k)`.
pub fn schrodinger_propagate(f: &ComplexField, t: f64) -> ComplexField {
    apply_multiplier_phase(f, |k2| -t * k2)
}

/// Free Klein-Gordon half-wave flow: `ghat(k) = e^{-+it<k>} fhat(k)`.
pub fn kg_propagate(f: &ComplexField, t: f64, sign: Sign) -> ComplexField {
    let s = sign.factor();
    apply_multiplier_phase(f, |k2| s * t * (1.0 + k2).sqrt())
}

fn apply_multiplier_phase<F>(f: &ComplexField, phase: F) -> ComplexField
where
    F: Fn(f64) -> f64,
{
    let grid = *f.grid();
    let mut out = f.clone();
    for (flat, c) in out.coeffs_mut().iter_mut().enumerate() {
        *c *= Complex64::from_polar(1.0, phase(grid.k2_of(flat)));
    }
    out
}

/// Step parameters for the fixed-step integrators and the Picard solver.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StepControl {
    pub h: f64,
    pub t_end: f64,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
}

impl StepControl {
    pub fn new(h: f64, t_end: f64) -> Result<StepControl> {
        let ctrl = StepControl {
            h,
            t_end,
            picard_tol: 1e-10,
            picard_max_iters: 50,
        };
        ctrl.validate()?;
        Ok(ctrl)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h <= self.t_end && self.t_end.is_finite()) {
            return Err(Error::Parameter(format!(
                "need 0 < h <= t_end, got h = {}, t_end = {}",
                self.h, self.t_end
            )));
        }
        if !(self.picard_tol > 0.0) || self.picard_max_iters < 1 {
            return Err(Error::Parameter(
                "picard_tol must be positive and picard_max_iters >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Number of steps of size `h` covering `[0, t_end]`; the last step is
    /// shortened when `t_end` is not a multiple of `h`.
    pub fn step_count(&self) -> usize {
        (self.t_end / self.h - 1e-9).ceil().max(1.0) as usize
    }
}

/// Exact free flow of all three components over a time `h`.
pub fn free_flow(s: &FirstOrderState, h: f64) -> FirstOrderState {
    FirstOrderState {
        psi: schrodinger_propagate(&s.psi, h),
        phi_plus: kg_propagate(&s.phi_plus, h, Sign::Plus),
        phi_minus: kg_propagate(&s.phi_minus, h, Sign::Minus),
        time: s.time + h,
    }
}

/// One Strang step: half linear flow, exact nonlinear subflow, half linear
/// flow.
///
/// The nonlinear subflow is solvable in closed form: the meson potential
/// `phi = Re((phi_plus + phi_minus)/2)` is constant along it, so the matter
/// field rotates pointwise by `e^{ih phi}`, and `|psi|^2` is constant along
/// it, so the meson branches drift affinely by `+- ih A^{-1/2}(|psi|^2)`.
/// Every substep is an `L^2` isometry on `psi`, so mass is conserved exactly.
pub fn strang_step(s: &FirstOrderState, h: f64, coupling: bool) -> Result<FirstOrderState> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Parameter(format!("step size must be positive, got {h}")));
    }
    let mut mid = free_flow(s, 0.5 * h);
    if coupling {
        let grid = *mid.psi.grid();
        // psi <- e^{ih phi} psi pointwise, with phi real.
        let phi_sum = mid.phi_plus.add(&mid.phi_minus)?;
        let phi_phys = phi_sum.to_physical();
        let mut psi_phys = mid.psi.to_physical();
        for (p, v) in psi_phys.iter_mut().zip(&phi_phys) {
            *p *= Complex64::from_polar(1.0, 0.5 * h * v.re);
        }
        // The collocation |psi|^2 is exactly invariant along the rotation, so
        // freezing it makes this substep the exact subflow.
        let source = a_pow(&collocation_abs_squared(&mid.psi)?, -0.5)?;
        mid.psi = ComplexField::from_physical(grid, psi_phys)?;
        mid.phi_plus.axpy(Complex64::i() * h, &source);
        mid.phi_minus.axpy(-Complex64::i() * h, &source);
    }
    Ok(free_flow(&mid, 0.5 * h))
}

/// Integrates with repeated Strang steps over `ctrl.t_end`.
pub fn strang_integrate(
    s: &FirstOrderState,
    ctrl: &StepControl,
    coupling: bool,
) -> Result<FirstOrderState> {
    ctrl.validate()?;
    let n = ctrl.step_count();
    let mut state = s.clone();
    for i in 0..n {
        let remaining = ctrl.t_end - i as f64 * ctrl.h;
        let h = ctrl.h.min(remaining);
        state = strang_step(&state, h, coupling)?;
    }
    Ok(state)
}

/// Coupling terms evaluated with collocation products, matching the spatial
/// discretization implied by the Strang scheme's pointwise substeps. Both
/// integrators then discretize the same finite-dimensional system and their
/// difference is purely temporal.
fn nonlinear_rhs(s: &FirstOrderState, coupling: bool) -> Result<FirstOrderState> {
    let grid = *s.grid();
    let mut dpsi = ComplexField::zero(grid);
    let mut dplus = ComplexField::zero(grid);
    let mut dminus = ComplexField::zero(grid);
    if coupling {
        let phi_sum = s.phi_plus.add(&s.phi_minus)?;
        let force = collocation_product(&phi_sum, &s.psi)?;
        dpsi.axpy(0.5 * Complex64::i(), &force);
        let source = a_pow(&collocation_abs_squared(&s.psi)?, -0.5)?;
        dplus.axpy(Complex64::i(), &source);
        dminus.axpy(-Complex64::i(), &source);
    }
    Ok(FirstOrderState {
        psi: dpsi,
        phi_plus: dplus,
        phi_minus: dminus,
        time: 0.0,
    })
}

fn lincomb(base: &FirstOrderState, terms: &[(f64, &FirstOrderState)]) -> FirstOrderState {
    let mut out = base.clone();
    for &(c, t) in terms {
        out.psi.axpy(c.into(), &t.psi);
        out.phi_plus.axpy(c.into(), &t.phi_plus);
        out.phi_minus.axpy(c.into(), &t.phi_minus);
    }
    out
}

fn combined_norm(s: &FirstOrderState) -> f64 {
    (s.psi.l2_norm().powi(2) + s.phi_plus.l2_norm().powi(2) + s.phi_minus.l2_norm().powi(2)).sqrt()
}

/// One step of classical RK4 with integrating factor for the stiff linear
/// symbols (the Lawson scheme): the linear flow is applied exactly and RK4
/// only sees the smooth nonlinearity. Accepts negative `h` for reversal runs.
pub fn lawson_rk4_step(s: &FirstOrderState, h: f64, coupling: bool) -> Result<FirstOrderState> {
    let half = |st: &FirstOrderState| free_flow(st, 0.5 * h);
    let full = |st: &FirstOrderState| free_flow(st, h);

    let k1 = nonlinear_rhs(s, coupling)?;
    let y2 = lincomb(&half(s), &[(0.5 * h, &half(&k1))]);
    let k2 = nonlinear_rhs(&y2, coupling)?;
    let y3 = lincomb(&half(s), &[(0.5 * h, &k2)]);
    let k3 = nonlinear_rhs(&y3, coupling)?;
    let y4 = lincomb(&full(s), &[(h, &half(&k3))]);
    let k4 = nonlinear_rhs(&y4, coupling)?;

    let mut out = full(s);
    let e2k1 = full(&k1);
    let ek2 = half(&k2);
    let ek3 = half(&k3);
    out = lincomb(
        &out,
        &[
            (h / 6.0, &e2k1),
            (h / 3.0, &ek2),
            (h / 3.0, &ek3),
            (h / 6.0, &k4),
        ],
    );
    out.time = s.time + h;
    Ok(out)
}

/// Brute-force reference integrator for convergence and drift measurements.
///
/// Fixed-step Lawson RK4 over `ctrl.t_end`, guarded against blow-up: the run
/// aborts if the combined norm exceeds 1e6 times its initial value.
pub fn oracle_integrate(
    s: &FirstOrderState,
    ctrl: &StepControl,
    coupling: bool,
) -> Result<FirstOrderState> {
    ctrl.validate()?;
    let guard = combined_norm(s).max(1e-300) * 1e6;
    let n = ctrl.step_count();
    let mut state = s.clone();
    for i in 0..n {
        let remaining = ctrl.t_end - i as f64 * ctrl.h;
        let h = ctrl.h.min(remaining);
        state = lawson_rk4_step(&state, h, coupling)?;
        if combined_norm(&state) > guard {
            return Err(Error::BlowUp {
                ratio: combined_norm(&state) / (guard / 1e6),
                time: state.time,
            });
        }
    }
    Ok(state)
}

/// Uniform sample times `i * h` for a horizon that must be an integer number
/// of steps; context trajectories for the Picard solver live on these nodes.
pub fn uniform_nodes(ctrl: &StepControl) -> Result<Vec<f64>> {
    ctrl.validate()?;
    let m = (ctrl.t_end / ctrl.h).round();
    if (ctrl.t_end - m * ctrl.h).abs() > 1e-9 * ctrl.t_end {
        return Err(Error::Parameter(format!(
            "horizon {} is not an integer multiple of step {}",
            ctrl.t_end, ctrl.h
        )));
    }
    let m = m as usize;
    Ok((0..=m).map(|i| i as f64 * ctrl.h).collect())
}

/// Strang integration recording the state at every node, initial state first.
pub fn strang_trajectory(
    s: &FirstOrderState,
    ctrl: &StepControl,
    coupling: bool,
) -> Result<Vec<FirstOrderState>> {
    let nodes = uniform_nodes(ctrl)?;
    let mut out = Vec::with_capacity(nodes.len());
    out.push(s.clone());
    for _ in 1..nodes.len() {
        let next = strang_step(out.last().unwrap(), ctrl.h, coupling)?;
        out.push(next);
    }
    Ok(out)
}

/// Oracle integration recording the state at every node, initial state first.
pub fn oracle_trajectory(
    s: &FirstOrderState,
    ctrl: &StepControl,
    coupling: bool,
) -> Result<Vec<FirstOrderState>> {
    let nodes = uniform_nodes(ctrl)?;
    let guard = combined_norm(s).max(1e-300) * 1e6;
    let mut out = Vec::with_capacity(nodes.len());
    out.push(s.clone());
    for _ in 1..nodes.len() {
        let next = lawson_rk4_step(out.last().unwrap(), ctrl.h, coupling)?;
        if combined_norm(&next) > guard {
            return Err(Error::BlowUp {
                ratio: combined_norm(&next) / (guard / 1e6),
                time: next.time,
            });
        }
        out.push(next);
    }
    Ok(out)
}

/// Relative distance between two states in the combined `L^2` norm.
pub fn state_distance(a: &FirstOrderState, b: &FirstOrderState) -> Result<f64> {
    let dp = a.psi.sub(&b.psi)?.l2_norm().powi(2);
    let dpl = a.phi_plus.sub(&b.phi_plus)?.l2_norm().powi(2);
    let dmi = a.phi_minus.sub(&b.phi_minus)?.l2_norm().powi(2);
    let scale = combined_norm(a).max(combined_norm(b)).max(1e-300);
    Ok((dp + dpl + dmi).sqrt() / scale)
}
