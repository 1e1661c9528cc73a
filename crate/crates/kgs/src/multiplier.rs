//! Diagonal Fourier operators: `ghat(k) = symbol(k) * fhat(k)`.
//!
//! The symbol sees the scaled frequency vector `(2*pi/L) * k`, so multipliers
//! defined through `|k|` behave identically across box lengths.

use crate::error::{Error, Result};
use crate::field::{ComplexField, RealField};
use num_complex::Complex64;

/// Applies a pointwise spectral symbol. The symbol receives the physical
/// frequency vector (unused axes are 0).
pub fn apply_multiplier<F>(f: &ComplexField, symbol: F) -> Result<ComplexField>
where
    F: Fn(&[f64; 3]) -> Complex64,
{
    let grid = *f.grid();
    let scale = grid.freq_scale();
    let mut out = f.clone();
    for (flat, c) in out.coeffs_mut().iter_mut().enumerate() {
        let k = grid.freq_of(flat);
        let xi = [
            k[0] as f64 * scale,
            k[1] as f64 * scale,
            k[2] as f64 * scale,
        ];
        let s = symbol(&xi);
        if !(s.re.is_finite() && s.im.is_finite()) {
            return Err(Error::Parameter(format!(
                "multiplier symbol is not finite at k = {:?}",
                &k[..grid.dim()]
            )));
        }
        *c *= s;
    }
    Ok(out)
}

/// Multiplier with an even real symbol of `|k|^2`; preserves conjugate symmetry.
pub fn apply_radial<F>(f: &ComplexField, symbol: F) -> Result<ComplexField>
where
    F: Fn(f64) -> f64,
{
    apply_multiplier(f, |xi| {
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        Complex64::new(symbol(k2), 0.0)
    })
}

/// `A^alpha = (1 - Laplacian)^alpha`, symbol `(1 + |k|^2)^alpha`.
pub fn a_pow(f: &ComplexField, alpha: f64) -> Result<ComplexField> {
    apply_radial(f, |k2| (1.0 + k2).powf(alpha))
}

/// Same as [`a_pow`] for real fields; the symbol is real and even, so
/// conjugate symmetry survives.
pub fn a_pow_real(f: &RealField, alpha: f64) -> Result<RealField> {
    let g = a_pow(f.as_complex(), alpha)?;
    RealField::from_complex(g)
}

/// Laplacian, symbol `-|k|^2`.
pub fn laplacian(f: &ComplexField) -> Result<ComplexField> {
    apply_radial(f, |k2| -k2)
}

/// `H^1` seminorm `||grad f||_{L^2} = (sum_k |k|^2 |fhat(k)|^2)^{1/2}`.
pub fn gradient_norm(f: &ComplexField) -> f64 {
    let grid = f.grid();
    let mut acc = 0.0;
    for (flat, c) in f.coeffs().iter().enumerate() {
        acc += grid.k2_of(flat) * c.norm_sqr();
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::testutil::random_field;
    use crate::field::{conjugate_symmetry_deviation, RealField};
    use crate::grid::Grid;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn a_pow_examples() {
        let grid = Grid::standard(3, 16).unwrap();
        let f = ComplexField::single_mode(grid, &[0, 0, 0], Complex64::new(1.0, 0.0));
        let g = a_pow(&f, 0.5).unwrap();
        assert!((g.get_mode(&[0, 0, 0]) - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let f = ComplexField::single_mode(grid, &[1, 0, 0], Complex64::new(1.0, 0.0));
        let g = a_pow(&f, 1.0).unwrap();
        assert!((g.get_mode(&[1, 0, 0]) - Complex64::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn half_powers_invert() {
        let grid = Grid::standard(3, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f = random_field(grid, &mut rng);
        let g = a_pow(&a_pow(&f, 0.5).unwrap(), -0.5).unwrap();
        assert!(f.sub(&g).unwrap().l2_norm() / f.l2_norm() < 1e-12);
    }

    #[test]
    fn composition_equals_product_symbol() {
        let grid = Grid::new(2, 8, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random_field(grid, &mut rng);
        let two_step = a_pow(&laplacian(&f).unwrap(), 0.7).unwrap();
        let one_step = apply_radial(&f, |k2| -k2 * (1.0 + k2).powf(0.7)).unwrap();
        assert!(two_step.sub(&one_step).unwrap().l2_norm() < 1e-12 * f.l2_norm().max(1.0));
    }

    #[test]
    fn real_symbols_preserve_conjugate_symmetry() {
        let grid = Grid::standard(2, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let r = crate::field::testutil::random_real_field(grid, &mut rng);
        let g = a_pow_real(&r, -0.5).unwrap();
        assert!(conjugate_symmetry_deviation(g.as_complex()) < 1e-12);
        let h = RealField::from_complex(laplacian(r.as_complex()).unwrap());
        assert!(h.is_ok());
    }

    #[test]
    fn non_finite_symbol_rejected() {
        let grid = Grid::standard(1, 8).unwrap();
        let f = ComplexField::single_mode(grid, &[0], Complex64::new(1.0, 0.0));
        // 1/|k|^2 diverges at k = 0.
        assert!(apply_radial(&f, |k2| 1.0 / k2).is_err());
    }
}
