//! Picard iteration on the Duhamel integral equations for the rough part of
//! a split solution.
//!
//! Given a context trajectory `(psi_ctx, phi_ctx_pm)` solving the full system
//! from the regular data, the rough part `(psi, phi_pm)` satisfies
//!
//!   `psi(t)    = e^{it Lap} psi0    - i int_0^t e^{i(t-s) Lap} F(s) ds`
//!   `phi_pm(t) = e^{-+it A^{1/2}} phi0_pm +- i int_0^t e^{-+i(t-s) A^{1/2}} G0(s) ds`
//!
//! with the mixed nonlinearities
//!
//!   `F  = -1/2 [ (psi + psi_ctx)(Phi + Phi_ctx) - psi_ctx Phi_ctx ]
//!       = -1/2 [ psi (Phi + Phi_ctx) + psi_ctx Phi ]`,
//!   `G0 = A^{-1/2} ( |psi + psi_ctx|^2 - |psi_ctx|^2 )
//!       = A^{-1/2} ( |psi|^2 + 2 Re(psi conj(psi_ctx)) )`,
//!
//! where `Phi := phi_plus + phi_minus`. The sum of context and rough parts
//! then solves the full system from the summed data. The expanded forms of
//! `F` and `G0` are pointwise identities on the collocation grid; they avoid
//! forming the context-only products entirely.
//!
//! The iteration stores only the integral parts `(w, z_pm)` per node and
//! recomputes the free evolutions on the fly (a diagonal multiplier each), so
//! peak memory stays proportional to six trajectory vectors even on large
//! grids.

use crate::error::{Error, Result};
use crate::evolution::{kg_propagate, schrodinger_propagate, uniform_nodes, Sign, StepControl};
use crate::field::ComplexField;
use crate::model::FirstOrderState;
use crate::multiplier::a_pow;
use num_complex::Complex64;

/// Converged trajectories of the rough system on the quadrature nodes,
/// together with the inhomogeneous (integral) parts.
#[derive(Debug, Clone)]
pub struct DuhamelSolution {
    pub times: Vec<f64>,
    /// Full rough fields `free + integral` at each node.
    pub psi: Vec<ComplexField>,
    pub phi_plus: Vec<ComplexField>,
    pub phi_minus: Vec<ComplexField>,
    /// Integral part of `psi`; `w[0]` is exactly zero.
    pub w: Vec<ComplexField>,
    /// Integral parts of `phi_pm`; zero at the first node.
    pub z_plus: Vec<ComplexField>,
    pub z_minus: Vec<ComplexField>,
    pub iterations: usize,
    pub final_residual: f64,
}

/// Final-node result of the Picard solve; the trajectory interior is
/// discarded as soon as the iteration converges.
#[derive(Debug, Clone)]
pub struct DuhamelEndpoint {
    pub time: f64,
    /// Full rough fields `free + integral` at the interval end.
    pub psi: ComplexField,
    pub phi_plus: ComplexField,
    pub phi_minus: ComplexField,
    /// Integral parts at the interval end.
    pub w: ComplexField,
    pub z_plus: ComplexField,
    pub z_minus: ComplexField,
    pub iterations: usize,
    pub final_residual: f64,
}

struct PicardOut {
    times: Vec<f64>,
    w: Vec<ComplexField>,
    z_plus: Vec<ComplexField>,
    z_minus: Vec<ComplexField>,
    iterations: usize,
    final_residual: f64,
}

fn validate(
    psi0: &ComplexField,
    phi0_plus: &ComplexField,
    phi0_minus: &ComplexField,
    context: &[FirstOrderState],
    ctrl: &StepControl,
) -> Result<Vec<f64>> {
    let times = uniform_nodes(ctrl)?;
    if context.len() != times.len() {
        return Err(Error::Parameter(format!(
            "context has {} samples, the node grid needs {}",
            context.len(),
            times.len()
        )));
    }
    let grid = *psi0.grid();
    if phi0_plus.grid() != &grid
        || phi0_minus.grid() != &grid
        || context.iter().any(|s| s.grid() != &grid)
    {
        return Err(Error::GridMismatch);
    }
    Ok(times)
}

/// Picard iteration with the trapezoid evaluation of the Duhamel integrals
/// fused into a single sweep per iteration, via the one-step recurrence
/// `I_i = e^{hL} I_{i-1} + (h/2)(e^{hL} S_{i-1} + S_i)`.
fn picard(
    psi0: &ComplexField,
    phi0_plus: &ComplexField,
    phi0_minus: &ComplexField,
    context: &[FirstOrderState],
    ctrl: &StepControl,
    times: Vec<f64>,
) -> Result<PicardOut> {
    let grid = *psi0.grid();
    let n = times.len();
    let h = ctrl.h;

    // Context collocation values are iteration-invariant; cache them once.
    let ctx_psi_phys: Vec<Vec<Complex64>> = context.iter().map(|s| s.psi.to_physical()).collect();
    let ctx_phi_phys: Vec<Vec<Complex64>> = context
        .iter()
        .map(|s| Ok(s.phi_plus.add(&s.phi_minus)?.to_physical()))
        .collect::<Result<_>>()?;

    let scale = psi0
        .l2_norm()
        .max(phi0_plus.l2_norm())
        .max(phi0_minus.l2_norm())
        .max(1e-300);

    let zero = ComplexField::zero(grid);
    let mut w = vec![zero.clone(); n];
    let mut zp = vec![zero.clone(); n];
    let mut zm = vec![zero.clone(); n];

    let mut prev_residual = f64::INFINITY;
    let mut growth_streak = 0usize;
    for iter in 1..=ctrl.picard_max_iters {
        let mut new_w = Vec::with_capacity(n);
        let mut new_zp = Vec::with_capacity(n);
        let mut new_zm = Vec::with_capacity(n);
        let mut acc_w = zero.clone();
        let mut acc_zp = zero.clone();
        let mut acc_zm = zero.clone();
        let mut prev_f = zero.clone();
        let mut prev_g = zero.clone();
        let mut residual = 0.0f64;
        for i in 0..n {
            let t = times[i];
            // Free evolutions are diagonal; recompute rather than store.
            let free_psi = schrodinger_propagate(psi0, t);
            let rough_psi = free_psi.add(&w[i])?;
            let rough_phi = kg_propagate(phi0_plus, t, Sign::Plus)
                .add(&kg_propagate(phi0_minus, t, Sign::Minus))?
                .add(&zp[i])?
                .add(&zm[i])?;
            let rp = rough_psi.to_physical();
            let rphi = rough_phi.to_physical();
            let cp = &ctx_psi_phys[i];
            let cphi = &ctx_phi_phys[i];
            let mut f_phys = Vec::with_capacity(rp.len());
            let mut g_phys = Vec::with_capacity(rp.len());
            for j in 0..rp.len() {
                f_phys.push(-0.5 * (rp[j] * (rphi[j] + cphi[j]) + cp[j] * rphi[j]));
                let cross = rp[j] * cp[j].conj();
                g_phys.push(Complex64::new(rp[j].norm_sqr() + 2.0 * cross.re, 0.0));
            }
            let f_i = ComplexField::from_physical(grid, f_phys)?;
            let g_i = a_pow(&ComplexField::from_physical(grid, g_phys)?, -0.5)?;
            if i == 0 {
                new_w.push(zero.clone());
                new_zp.push(zero.clone());
                new_zm.push(zero.clone());
            } else {
                acc_w = schrodinger_propagate(&acc_w, h);
                acc_w.axpy((0.5 * h).into(), &schrodinger_propagate(&prev_f, h));
                acc_w.axpy((0.5 * h).into(), &f_i);
                acc_zp = kg_propagate(&acc_zp, h, Sign::Plus);
                acc_zp.axpy((0.5 * h).into(), &kg_propagate(&prev_g, h, Sign::Plus));
                acc_zp.axpy((0.5 * h).into(), &g_i);
                acc_zm = kg_propagate(&acc_zm, h, Sign::Minus);
                acc_zm.axpy((0.5 * h).into(), &kg_propagate(&prev_g, h, Sign::Minus));
                acc_zm.axpy((0.5 * h).into(), &g_i);
                let wi = acc_w.scaled(-Complex64::i());
                let zpi = acc_zp.scaled(Complex64::i());
                let zmi = acc_zm.scaled(-Complex64::i());
                residual = residual
                    .max(wi.sub(&w[i])?.l2_norm())
                    .max(zpi.sub(&zp[i])?.l2_norm())
                    .max(zmi.sub(&zm[i])?.l2_norm());
                new_w.push(wi);
                new_zp.push(zpi);
                new_zm.push(zmi);
            }
            prev_f = f_i;
            prev_g = g_i;
        }
        let residual = residual / scale;
        w = new_w;
        zp = new_zp;
        zm = new_zm;
        if residual < ctrl.picard_tol {
            return Ok(PicardOut {
                times,
                w,
                z_plus: zp,
                z_minus: zm,
                iterations: iter,
                final_residual: residual,
            });
        }
        if residual >= prev_residual {
            growth_streak += 1;
            if growth_streak >= 3 {
                return Err(Error::IntervalTooLong {
                    residual,
                    growth_streak,
                });
            }
        } else {
            growth_streak = 0;
        }
        prev_residual = residual;
    }
    // Ran out of iterations without contraction failure; treat as too long.
    Err(Error::IntervalTooLong {
        residual: prev_residual,
        growth_streak,
    })
}

/// Solves the rough-part integral equations by Picard iteration, returning
/// the full trajectories.
///
/// `context` must hold the regular trajectory at the uniform nodes implied by
/// `ctrl` (use states of zero fields for a pure self-interaction run). The
/// iteration starts from the free evolution and stops when the relative sup
/// distance between successive trajectories drops below `ctrl.picard_tol`.
/// Residual growth over 3 consecutive iterations aborts with an
/// interval-too-long error so the caller can shrink the interval.
pub fn duhamel_solve(
    psi0: &ComplexField,
    phi0_plus: &ComplexField,
    phi0_minus: &ComplexField,
    context: &[FirstOrderState],
    ctrl: &StepControl,
) -> Result<DuhamelSolution> {
    let times = validate(psi0, phi0_plus, phi0_minus, context, ctrl)?;
    let out = picard(psi0, phi0_plus, phi0_minus, context, ctrl, times)?;
    let mut psi = Vec::with_capacity(out.times.len());
    let mut plus = Vec::with_capacity(out.times.len());
    let mut minus = Vec::with_capacity(out.times.len());
    for (i, &t) in out.times.iter().enumerate() {
        psi.push(schrodinger_propagate(psi0, t).add(&out.w[i])?);
        plus.push(kg_propagate(phi0_plus, t, Sign::Plus).add(&out.z_plus[i])?);
        minus.push(kg_propagate(phi0_minus, t, Sign::Minus).add(&out.z_minus[i])?);
    }
    Ok(DuhamelSolution {
        times: out.times,
        psi,
        phi_plus: plus,
        phi_minus: minus,
        w: out.w,
        z_plus: out.z_plus,
        z_minus: out.z_minus,
        iterations: out.iterations,
        final_residual: out.final_residual,
    })
}

/// As [`duhamel_solve`], but keeps only the final node; the interior of the
/// trajectory is dropped, which matters on large grids.
pub fn duhamel_endpoint(
    psi0: &ComplexField,
    phi0_plus: &ComplexField,
    phi0_minus: &ComplexField,
    context: &[FirstOrderState],
    ctrl: &StepControl,
) -> Result<DuhamelEndpoint> {
    let times = validate(psi0, phi0_plus, phi0_minus, context, ctrl)?;
    let out = picard(psi0, phi0_plus, phi0_minus, context, ctrl, times)?;
    let last = out.times.len() - 1;
    let t = out.times[last];
    let w = out.w[last].clone();
    let z_plus = out.z_plus[last].clone();
    let z_minus = out.z_minus[last].clone();
    Ok(DuhamelEndpoint {
        time: t,
        psi: schrodinger_propagate(psi0, t).add(&w)?,
        phi_plus: kg_propagate(phi0_plus, t, Sign::Plus).add(&z_plus)?,
        phi_minus: kg_propagate(phi0_minus, t, Sign::Minus).add(&z_minus)?,
        w,
        z_plus,
        z_minus,
        iterations: out.iterations,
        final_residual: out.final_residual,
    })
}

/// Context of zero fields on the given node grid, for pure self-interaction
/// runs of the rough system.
pub fn zero_context(grid: crate::grid::Grid, ctrl: &StepControl) -> Result<Vec<FirstOrderState>> {
    let times = uniform_nodes(ctrl)?;
    Ok(times
        .iter()
        .map(|&t| FirstOrderState {
            psi: ComplexField::zero(grid),
            phi_plus: ComplexField::zero(grid),
            phi_minus: ComplexField::zero(grid),
            time: t,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{oracle_trajectory, state_distance};
    use crate::field::testutil::{random_field, random_real_field};
    use crate::field::RealField;
    use crate::grid::Grid;
    use crate::model::{to_first_order, SecondOrderState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_state(grid: Grid, seed: u64, amp: f64) -> FirstOrderState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = SecondOrderState::new(
            random_field(grid, &mut rng).scaled(amp.into()),
            RealField::symmetrized(&random_real_field(grid, &mut rng).into_complex().scaled(amp.into())),
            RealField::symmetrized(&random_real_field(grid, &mut rng).into_complex().scaled(amp.into())),
            0.0,
        )
        .unwrap();
        to_first_order(&s).unwrap()
    }

    #[test]
    fn zero_rough_data_gives_zero_solution() {
        let grid = Grid::standard(2, 8).unwrap();
        let ctrl = StepControl::new(0.01, 0.1).unwrap();
        // Nontrivial context, zero rough data: F and G vanish on the zero
        // fixed point, so one iteration confirms it.
        let ctx_state = small_state(grid, 4, 0.3);
        let context = oracle_trajectory(&ctx_state, &ctrl, true).unwrap();
        let zero = ComplexField::zero(grid);
        let sol = duhamel_solve(&zero, &zero, &zero, &context, &ctrl).unwrap();
        assert_eq!(sol.iterations, 1);
        for i in 0..sol.times.len() {
            assert_eq!(sol.psi[i].l2_norm(), 0.0);
            assert_eq!(sol.w[i].l2_norm(), 0.0);
            assert_eq!(sol.z_plus[i].l2_norm(), 0.0);
            assert_eq!(sol.z_minus[i].l2_norm(), 0.0);
        }
    }

    #[test]
    fn integral_parts_vanish_at_t_zero() {
        let grid = Grid::standard(2, 8).unwrap();
        let ctrl = StepControl::new(0.01, 0.05).unwrap();
        let s = small_state(grid, 8, 0.2);
        let context = zero_context(grid, &ctrl).unwrap();
        let sol = duhamel_solve(&s.psi, &s.phi_plus, &s.phi_minus, &context, &ctrl).unwrap();
        assert_eq!(sol.w[0].l2_norm(), 0.0);
        assert_eq!(sol.z_plus[0].l2_norm(), 0.0);
        assert_eq!(sol.z_minus[0].l2_norm(), 0.0);
        assert!(sol.final_residual < ctrl.picard_tol);
    }

    #[test]
    fn zero_context_matches_direct_integration() {
        // With zero context the integral equations describe the full system
        // applied to the rough data alone; compare against the oracle.
        let grid = Grid::standard(2, 8).unwrap();
        let ctrl = StepControl::new(5e-4, 0.1).unwrap();
        let s = small_state(grid, 15, 0.3);
        let context = zero_context(grid, &ctrl).unwrap();
        let sol = duhamel_solve(&s.psi, &s.phi_plus, &s.phi_minus, &context, &ctrl).unwrap();
        let reference = oracle_trajectory(&s, &ctrl, true).unwrap();
        let last = sol.times.len() - 1;
        let end = FirstOrderState {
            psi: sol.psi[last].clone(),
            phi_plus: sol.phi_plus[last].clone(),
            phi_minus: sol.phi_minus[last].clone(),
            time: sol.times[last],
        };
        let d = state_distance(&end, &reference[last]).unwrap();
        assert!(d < 1e-6, "distance to direct integration {d:.3e}");
    }

    #[test]
    fn endpoint_agrees_with_full_solve() {
        let grid = Grid::standard(2, 8).unwrap();
        let ctrl = StepControl::new(1e-3, 0.05).unwrap();
        let a = small_state(grid, 40, 0.3);
        let b = small_state(grid, 41, 0.3);
        let context = oracle_trajectory(&a, &ctrl, true).unwrap();
        let sol = duhamel_solve(&b.psi, &b.phi_plus, &b.phi_minus, &context, &ctrl).unwrap();
        let end = duhamel_endpoint(&b.psi, &b.phi_plus, &b.phi_minus, &context, &ctrl).unwrap();
        let last = sol.times.len() - 1;
        assert_eq!(end.iterations, sol.iterations);
        assert!(end.w.sub(&sol.w[last]).unwrap().l2_norm() == 0.0);
        assert!(end.z_plus.sub(&sol.z_plus[last]).unwrap().l2_norm() == 0.0);
        assert!(end.psi.sub(&sol.psi[last]).unwrap().l2_norm() == 0.0);
        assert_eq!(end.time, sol.times[last]);
    }

    #[test]
    fn rough_plus_context_matches_full_run() {
        // Additivity: context solves the full system from data A, the rough
        // solver sees data B; the sum must match a full run from A + B.
        let grid = Grid::standard(2, 8).unwrap();
        let ctrl = StepControl::new(5e-4, 0.1).unwrap();
        let a = small_state(grid, 21, 0.3);
        let b = small_state(grid, 22, 0.3);
        let context = oracle_trajectory(&a, &ctrl, true).unwrap();
        let sol = duhamel_solve(&b.psi, &b.phi_plus, &b.phi_minus, &context, &ctrl).unwrap();
        let full_start = FirstOrderState {
            psi: a.psi.add(&b.psi).unwrap(),
            phi_plus: a.phi_plus.add(&b.phi_plus).unwrap(),
            phi_minus: a.phi_minus.add(&b.phi_minus).unwrap(),
            time: 0.0,
        };
        let full = oracle_trajectory(&full_start, &ctrl, true).unwrap();
        let last = sol.times.len() - 1;
        let summed = FirstOrderState {
            psi: sol.psi[last].add(&context[last].psi).unwrap(),
            phi_plus: sol.phi_plus[last].add(&context[last].phi_plus).unwrap(),
            phi_minus: sol.phi_minus[last].add(&context[last].phi_minus).unwrap(),
            time: sol.times[last],
        };
        let d = state_distance(&summed, &full[last]).unwrap();
        assert!(d < 1e-5, "additivity defect {d:.3e}");
    }

    #[test]
    fn long_interval_fails_to_contract() {
        let grid = Grid::standard(1, 8).unwrap();
        let s = small_state(grid, 33, 40.0);
        let mut ctrl = StepControl::new(0.5, 10.0).unwrap();
        ctrl.picard_max_iters = 30;
        let context = zero_context(grid, &ctrl).unwrap();
        match duhamel_solve(&s.psi, &s.phi_plus, &s.phi_minus, &context, &ctrl) {
            Err(Error::IntervalTooLong { .. }) => {}
            other => panic!("expected interval-too-long, got {other:?}"),
        }
    }

    #[test]
    fn context_length_is_checked() {
        let grid = Grid::standard(1, 8).unwrap();
        let ctrl = StepControl::new(0.01, 0.1).unwrap();
        let zero = ComplexField::zero(grid);
        let context = zero_context(grid, &StepControl::new(0.01, 0.05).unwrap()).unwrap();
        assert!(duhamel_solve(&zero, &zero, &zero, &context, &ctrl).is_err());
    }
}
