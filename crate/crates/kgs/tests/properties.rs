//! Randomized property tests of the library's structural invariants.

use kgs::decomposition::{generate_rough_data, split_data, RegularityParams, RoughStyle};
use kgs::driver::plan_intervals;
use kgs::evolution::{free_flow, kg_propagate, schrodinger_propagate, strang_step, Sign};
use kgs::model::{random_smooth_state, to_first_order};
use kgs::multiplier::a_pow;
use kgs::probes::{bilinear_probe_with_fields, xsb_norm, SpaceTimeField, Window};
use kgs::probes::annulus_field;
use kgs::dyadic::DyadicIndex;
use kgs::{ComplexField, Grid, RealField};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_field(seed: u64) -> ComplexField {
    let grid = Grid::standard(2, 8).unwrap();
    generate_rough_data(grid, 1.0, seed, RoughStyle::Random).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn split_reconstructs_and_separates(seed in 0u64..1000, n_cut in 1.0f64..6.0) {
        let f = small_field(seed);
        let grid = *f.grid();
        let params = RegularityParams::new(0.75, 0.75, n_cut, 0.05).unwrap();
        let zero = RealField::zero(grid);
        let sp = split_data(&f, &zero, &zero, params).unwrap();
        let back = sp.psi01.add(&sp.psi02).unwrap();
        prop_assert_eq!(back.sub(&f).unwrap().l2_norm(), 0.0);
        for (a, b) in sp.psi01.coeffs().iter().zip(sp.psi02.coeffs()) {
            prop_assert_eq!(a * b, Complex64::default());
        }
        prop_assert!(sp.psi01.l2_norm() <= f.l2_norm() + 1e-15);
    }

    #[test]
    fn propagators_are_unitary_on_weighted_norms(
        seed in 0u64..1000,
        t in -5.0f64..5.0,
        s in 0.0f64..1.5,
    ) {
        let f = small_field(seed);
        let base = f.sobolev_norm(s).unwrap();
        for g in [
            schrodinger_propagate(&f, t),
            kg_propagate(&f, t, Sign::Plus),
            kg_propagate(&f, t, Sign::Minus),
        ] {
            prop_assert!((g.sobolev_norm(s).unwrap() - base).abs() <= 1e-12 * base.max(1.0));
        }
    }

    #[test]
    fn smoothing_multiplier_inverts(seed in 0u64..1000, alpha in -1.5f64..1.5) {
        let f = small_field(seed);
        let round = a_pow(&a_pow(&f, alpha).unwrap(), -alpha).unwrap();
        prop_assert!(round.sub(&f).unwrap().l2_norm() <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn free_flow_composes(seed in 0u64..1000, a in 0.01f64..1.0, b in 0.01f64..1.0) {
        let grid = Grid::standard(2, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = to_first_order(&random_smooth_state(grid, &mut rng).unwrap()).unwrap();
        let once = free_flow(&s, a + b);
        let twice = free_flow(&free_flow(&s, a), b);
        prop_assert!(once.psi.sub(&twice.psi).unwrap().l2_norm() <= 1e-12 * once.psi.l2_norm());
        prop_assert!(
            once.phi_plus.sub(&twice.phi_plus).unwrap().l2_norm()
                <= 1e-12 * once.phi_plus.l2_norm().max(1.0)
        );
    }

    #[test]
    fn strang_conserves_mass(seed in 0u64..1000, h in 1e-4f64..1e-2) {
        let grid = Grid::standard(2, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = to_first_order(&random_smooth_state(grid, &mut rng).unwrap()).unwrap();
        let m0 = s.psi.l2_norm();
        for _ in 0..5 {
            s = strang_step(&s, h, true).unwrap();
        }
        prop_assert!((s.psi.l2_norm() - m0).abs() <= 1e-11 * m0);
    }

    #[test]
    fn bilinear_ratio_is_scale_invariant(seed in 0u64..1000, scale in 0.1f64..10.0) {
        let grid = Grid::standard(2, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f1 = annulus_field(grid, DyadicIndex(1), &mut rng).unwrap();
        let f2 = annulus_field(grid, DyadicIndex(1), &mut rng).unwrap();
        let base = bilinear_probe_with_fields(&f1, &f2, DyadicIndex(1), DyadicIndex(1), Sign::Minus, 4.0, 8).unwrap();
        let scaled = bilinear_probe_with_fields(
            &f1.scaled(Complex64::from(scale)),
            &f2.scaled(Complex64::from(7.0)),
            DyadicIndex(1), DyadicIndex(1), Sign::Minus, 4.0, 8,
        ).unwrap();
        prop_assert!((base.ratio - scaled.ratio).abs() <= 1e-12 * base.ratio.max(1.0));
    }

    #[test]
    fn space_time_norm_is_monotone_in_s(seed in 0u64..1000, s1 in 0.0f64..1.0, ds in 0.0f64..1.0) {
        let data = small_field(seed);
        let field = SpaceTimeField::sample(4.0, 8, Window::Hann, |t| {
            Ok(schrodinger_propagate(&data, t))
        }).unwrap();
        let lo = xsb_norm(&field, s1, 0.5, kgs::probes::Dispersion::Schrodinger).unwrap();
        let hi = xsb_norm(&field, s1 + ds, 0.5, kgs::probes::Dispersion::Schrodinger).unwrap();
        prop_assert!(hi >= lo - 1e-12);
    }

    #[test]
    fn interval_plans_cover_the_horizon(
        s in 0.71f64..1.0,
        m in 0.71f64..1.0,
        n_cut in 1.0f64..64.0,
        horizon in 0.1f64..10.0,
    ) {
        let params = RegularityParams::new(s, m, n_cut, 0.05).unwrap();
        let plan = plan_intervals(&params, horizon).unwrap();
        prop_assert!(plan.length <= 1.0);
        prop_assert!(plan.count >= 1);
        // Enough intervals to cover the horizon, and not one more than needed.
        prop_assert!(plan.count as f64 * plan.length >= horizon - 1e-9);
        prop_assert!((plan.count as f64 - 1.0) * plan.length < horizon + 1e-9);
    }
}
