//! Periodic scalar fields stored as Fourier coefficient arrays.
//!
//! The transform convention is unitary with respect to the quadrature inner
//! product: `||f||_{L^2}^2 = sum_k |fhat(k)|^2 = (L/n)^d sum_x |f(x)|^2`
//! (Plancherel with constant 1). Coefficients are therefore independent of the
//! sampling resolution, which makes zero-padding a plain embedding.

use crate::error::{Error, Result};
use crate::fft::transform_nd;
use crate::grid::Grid;
use num_complex::Complex64;

/// Complex scalar field on a periodic grid, stored spectrally.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl ComplexField {
    pub fn zero(grid: Grid) -> ComplexField {
        ComplexField {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<ComplexField> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "coefficient array has length {}, grid needs {}",
                coeffs.len(),
                grid.len()
            )));
        }
        let f = ComplexField { grid, coeffs };
        f.check_finite()?;
        Ok(f)
    }

    /// Field with a single excited mode.
    pub fn single_mode(grid: Grid, k: &[i64], value: Complex64) -> ComplexField {
        let mut f = ComplexField::zero(grid);
        f.coeffs[grid.index_of(k)] = value;
        f
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn get_mode(&self, k: &[i64]) -> Complex64 {
        self.coeffs[self.grid.index_of(k)]
    }

    pub fn set_mode(&mut self, k: &[i64], value: Complex64) {
        let idx = self.grid.index_of(k);
        self.coeffs[idx] = value;
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidField("non-finite coefficient".into()))
        }
    }

    /// Physical-space samples on the grid's collocation points.
    pub fn to_physical(&self) -> Vec<Complex64> {
        let mut data = self.coeffs.clone();
        transform_nd(&mut data, self.grid.dim(), self.grid.n(), true);
        let scale = 1.0 / self.grid.length().powf(self.grid.dim() as f64 / 2.0);
        for v in &mut data {
            *v *= scale;
        }
        data
    }

    /// Inverse of [`to_physical`]: spectral coefficients from collocation samples.
    pub fn from_physical(grid: Grid, mut values: Vec<Complex64>) -> Result<ComplexField> {
        if values.len() != grid.len() {
            return Err(Error::InvalidField("sample array does not match grid".into()));
        }
        transform_nd(&mut values, grid.dim(), grid.n(), false);
        let scale = grid.length().powf(grid.dim() as f64 / 2.0) / grid.len() as f64;
        for v in &mut values {
            *v *= scale;
        }
        ComplexField::from_coeffs(grid, values)
    }

    /// Coefficient-space `L^2` norm (equals the quadrature norm by Plancherel).
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Quadrature `L^2` norm `((L/n)^d sum_x |f(x)|^2)^{1/2}`, computed in
    /// physical space. Used as the independent route in Plancherel checks.
    pub fn quadrature_l2_norm(&self) -> f64 {
        let phys = self.to_physical();
        let cell = (self.grid.length() / self.grid.n() as f64).powi(self.grid.dim() as i32);
        (cell * phys.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Fractional Sobolev norm `(sum_k <k>^{2s} |fhat(k)|^2)^{1/2}`.
    pub fn sobolev_norm(&self, s: f64) -> Result<f64> {
        if !s.is_finite() {
            return Err(Error::Parameter(format!("Sobolev index must be finite, got {s}")));
        }
        self.check_finite()?;
        let mut acc = 0.0;
        for (flat, c) in self.coeffs.iter().enumerate() {
            let w = (1.0 + self.grid.k2_of(flat)).powf(s);
            acc += w * c.norm_sqr();
        }
        Ok(acc.sqrt())
    }

    /// Complex conjugate of the field (in physical space): `ghat(k) = conj(fhat(-k))`.
    pub fn conjugated(&self) -> ComplexField {
        let mut out = ComplexField::zero(self.grid);
        for flat in 0..self.coeffs.len() {
            let k = self.grid.freq_of(flat);
            let neg: Vec<i64> = k[..self.grid.dim()].iter().map(|&ki| -ki).collect();
            out.coeffs[flat] = self.coeffs[self.grid.index_of(&neg)].conj();
        }
        out
    }

    pub fn scaled(&self, factor: Complex64) -> ComplexField {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= factor;
        }
        out
    }

    pub fn add(&self, other: &ComplexField) -> Result<ComplexField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &ComplexField) -> Result<ComplexField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= b;
        }
        Ok(out)
    }

    /// `self + factor * other`, in place.
    pub fn axpy(&mut self, factor: Complex64, other: &ComplexField) {
        debug_assert_eq!(self.grid, other.grid);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += factor * b;
        }
    }

    /// Hermitian inner product `sum_k conj(fhat) ghat`.
    pub fn inner(&self, other: &ComplexField) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Embed the coefficients into a finer lattice (zero padding).
    pub fn embedded(&self, target: Grid) -> ComplexField {
        let mut out = ComplexField::zero(target);
        for flat in 0..self.coeffs.len() {
            if let Some(idx) = self.grid.embed_index(flat, &target) {
                out.coeffs[idx] = self.coeffs[flat];
            }
        }
        out
    }

    /// Restrict the coefficients to a coarser lattice (mode truncation).
    pub fn truncated(&self, target: Grid) -> ComplexField {
        let mut out = ComplexField::zero(target);
        for flat in 0..out.coeffs.len() {
            if let Some(idx) = target.embed_index(flat, &self.grid) {
                out.coeffs[flat] = self.coeffs[idx];
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Zeroes every mode with a component at the unpaired Nyquist frequency
/// `-n/2`. On an even grid that mode has no `+n/2` partner, so keeping it in
/// a product output breaks conjugate symmetry (real times real would come out
/// slightly complex).
fn drop_nyquist(f: &mut ComplexField) {
    let grid = *f.grid();
    let nyq = -((grid.n() / 2) as i64);
    for flat in 0..grid.len() {
        let k = grid.freq_of(flat);
        if k[..grid.dim()].contains(&nyq) {
            f.coeffs[flat] = Complex64::default();
        }
    }
}

/// Dealiased pointwise product of two fields via the 3/2 zero-padding rule.
///
/// Both factors are trigonometric polynomials of bandwidth `n/2`, so their
/// product is recovered exactly on the padded grid before truncation. Output
/// Nyquist components are dropped; see [`drop_nyquist`].
pub fn product(a: &ComplexField, b: &ComplexField) -> Result<ComplexField> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let padded = a.grid.padded();
    let pa = a.embedded(padded).to_physical();
    let pb = b.embedded(padded).to_physical();
    let vals: Vec<Complex64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
    let prod = ComplexField::from_physical(padded, vals)?;
    let mut out = prod.truncated(a.grid);
    drop_nyquist(&mut out);
    Ok(out)
}

/// Dealiased `|f|^2` as a spectral field. The result is exactly conjugate
/// symmetric (real), with output Nyquist components dropped.
pub fn abs_squared(f: &ComplexField) -> Result<ComplexField> {
    let padded = f.grid().padded();
    let p = f.embedded(padded).to_physical();
    let vals: Vec<Complex64> = p.iter().map(|x| Complex64::new(x.norm_sqr(), 0.0)).collect();
    let prod = ComplexField::from_physical(padded, vals)?;
    let mut out = prod.truncated(*f.grid());
    drop_nyquist(&mut out);
    Ok(out)
}

/// Pointwise product on the collocation grid itself, without padding.
///
/// This is the product implied by pointwise substeps like `psi <- e^{ih phi}
/// psi`: high modes wrap, but the operation is exact in value space. The
/// time-stepping pipeline uses it so that splitting substeps are exact flows
/// of one fixed finite-dimensional system; measurements use the dealiased
/// [`product`] instead.
pub fn collocation_product(a: &ComplexField, b: &ComplexField) -> Result<ComplexField> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let pa = a.to_physical();
    let pb = b.to_physical();
    let vals: Vec<Complex64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
    ComplexField::from_physical(a.grid, vals)
}

/// `|f|^2` evaluated pointwise on the collocation grid. Exactly real (the
/// values are real, so the coefficients are conjugate symmetric with a real
/// Nyquist component), and exactly invariant under pointwise phase rotation
/// of `f`.
pub fn collocation_abs_squared(f: &ComplexField) -> Result<ComplexField> {
    let p = f.to_physical();
    let vals: Vec<Complex64> = p.iter().map(|x| Complex64::new(x.norm_sqr(), 0.0)).collect();
    ComplexField::from_physical(*f.grid(), vals)
}

/// Quadrature of a pointwise triple product `a * b * c` on the padded grid.
///
/// The same routine backs both the energy functional and the increment
/// expansion, so the term-by-term identity between them holds to roundoff.
pub fn triple_quadrature(a: &ComplexField, b: &ComplexField, c: &ComplexField) -> Result<Complex64> {
    if a.grid() != b.grid() || a.grid() != c.grid() {
        return Err(Error::GridMismatch);
    }
    let padded = a.grid().padded();
    let pa = a.embedded(padded).to_physical();
    let pb = b.embedded(padded).to_physical();
    let pc = c.embedded(padded).to_physical();
    let cell = (padded.length() / padded.n() as f64).powi(padded.dim() as i32);
    let mut acc = Complex64::default();
    for i in 0..pa.len() {
        acc += pa[i] * pb[i] * pc[i];
    }
    Ok(acc * cell)
}

/// Real scalar field: a [`ComplexField`] with conjugate symmetry
/// `fhat(-k) = conj(fhat(k))`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    inner: ComplexField,
}

impl RealField {
    pub fn zero(grid: Grid) -> RealField {
        RealField {
            inner: ComplexField::zero(grid),
        }
    }

    /// Wraps a complex field, requiring conjugate symmetry to 1e-12 relative.
    pub fn from_complex(f: ComplexField) -> Result<RealField> {
        let dev = conjugate_symmetry_deviation(&f);
        let scale = f.max_abs().max(1e-300);
        if dev / scale > 1e-12 {
            return Err(Error::InvalidField(format!(
                "conjugate symmetry violated: relative deviation {:.3e}",
                dev / scale
            )));
        }
        Ok(RealField::symmetrized(&f))
    }

    /// Projects a complex field onto its conjugate-symmetric (real) part.
    pub fn symmetrized(f: &ComplexField) -> RealField {
        let grid = *f.grid();
        let mut out = ComplexField::zero(grid);
        for flat in 0..grid.len() {
            let k = grid.freq_of(flat);
            let neg: Vec<i64> = k[..grid.dim()].iter().map(|&ki| -ki).collect();
            let mirrored = f.coeffs()[grid.index_of(&neg)].conj();
            out.coeffs_mut()[flat] = 0.5 * (f.coeffs()[flat] + mirrored);
        }
        RealField { inner: out }
    }

    pub fn from_physical_real(grid: Grid, values: &[f64]) -> Result<RealField> {
        let complex: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let f = ComplexField::from_physical(grid, complex)?;
        Ok(RealField::symmetrized(&f))
    }

    pub fn as_complex(&self) -> &ComplexField {
        &self.inner
    }

    pub fn into_complex(self) -> ComplexField {
        self.inner
    }

    pub fn grid(&self) -> &Grid {
        self.inner.grid()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner.l2_norm()
    }

    pub fn sobolev_norm(&self, s: f64) -> Result<f64> {
        self.inner.sobolev_norm(s)
    }

    pub fn to_physical_real(&self) -> Vec<f64> {
        self.inner.to_physical().iter().map(|v| v.re).collect()
    }
}

/// Largest absolute deviation from `fhat(-k) = conj(fhat(k))`.
pub fn conjugate_symmetry_deviation(f: &ComplexField) -> f64 {
    let grid = f.grid();
    let mut worst = 0.0f64;
    for flat in 0..grid.len() {
        let k = grid.freq_of(flat);
        let neg: Vec<i64> = k[..grid.dim()].iter().map(|&ki| -ki).collect();
        let mirrored = f.coeffs()[grid.index_of(&neg)].conj();
        worst = worst.max((f.coeffs()[flat] - mirrored).norm());
    }
    worst
}


#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn plancherel_both_ways() {
        let grid = Grid::standard(3, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_field(grid, &mut rng);
        let a = f.l2_norm();
        let b = f.quadrature_l2_norm();
        assert!((a - b).abs() / a < 1e-12);
    }

    #[test]
    fn transform_roundtrip_identity() {
        let grid = Grid::new(2, 16, 5.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_field(grid, &mut rng);
        let back = ComplexField::from_physical(grid, f.to_physical()).unwrap();
        let err = f.sub(&back).unwrap().l2_norm() / f.l2_norm();
        assert!(err < 1e-12);
    }

    #[test]
    fn sobolev_examples() {
        let grid = Grid::standard(3, 16).unwrap();
        // fhat(0) = 1: norm 1 for any s.
        let f = ComplexField::single_mode(grid, &[0, 0, 0], Complex64::new(1.0, 0.0));
        for s in [-1.0, 0.0, 0.5, 2.0] {
            assert!((f.sobolev_norm(s).unwrap() - 1.0).abs() < 1e-15);
        }
        // fhat((2,2,1)) = 1, s = 1: sqrt(1 + 9) = sqrt(10).
        let g = ComplexField::single_mode(grid, &[2, 2, 1], Complex64::new(1.0, 0.0));
        assert!((g.sobolev_norm(1.0).unwrap() - 10f64.sqrt()).abs() < 1e-12);
        // s = 0 is the L^2 norm.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let r = random_field(grid, &mut rng);
        assert!((r.sobolev_norm(0.0).unwrap() - r.l2_norm()).abs() < 1e-12);
    }

    #[test]
    fn sobolev_rejects_non_finite() {
        let grid = Grid::standard(1, 8).unwrap();
        let mut f = ComplexField::zero(grid);
        f.coeffs_mut()[1] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(f.sobolev_norm(1.0), Err(Error::InvalidField(_))));
    }

    #[test]
    fn dealiased_product_matches_convolution() {
        // Direct lattice convolution as the independent route:
        // (fg)^hat(k) = L^{-d/2} sum_j fhat(j) ghat(k-j).
        let grid = Grid::standard(1, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = random_field(grid, &mut rng);
        let g = random_field(grid, &mut rng);
        let p = product(&f, &g).unwrap();
        let norm = grid.length().powf(grid.dim() as f64 / 2.0);
        // The unpaired output mode at k = -4 is dropped by convention.
        assert_eq!(p.get_mode(&[-4]), Complex64::default());
        for k in -3i64..4 {
            let mut acc = Complex64::default();
            for j in -4i64..4 {
                let kj = k - j;
                if !(-4..4).contains(&kj) {
                    continue;
                }
                acc += f.get_mode(&[j]) * g.get_mode(&[kj]);
            }
            let expect = acc / norm;
            assert!((p.get_mode(&[k]) - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn abs_squared_is_real() {
        let grid = Grid::standard(2, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let f = random_field(grid, &mut rng);
        let sq = abs_squared(&f).unwrap();
        assert!(conjugate_symmetry_deviation(&sq) < 1e-12 * sq.max_abs());
        for v in sq.to_physical() {
            assert!(v.im.abs() < 1e-12 * sq.max_abs());
        }
    }

    #[test]
    fn real_field_symmetry_preserved_and_checked() {
        let grid = Grid::standard(2, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = random_real_field(grid, &mut rng);
        assert!(conjugate_symmetry_deviation(r.as_complex()) < 1e-13);
        for v in r.to_physical_real() {
            assert!(v.is_finite());
        }
        // An asymmetric field is rejected.
        let mut bad = r.as_complex().clone();
        bad.coeffs_mut()[1] += Complex64::new(0.5, 0.5);
        assert!(RealField::from_complex(bad).is_err());
    }

    #[test]
    fn triple_quadrature_is_linear_in_each_slot() {
        let grid = Grid::standard(1, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_field(grid, &mut rng);
        let b = random_field(grid, &mut rng);
        let c = random_field(grid, &mut rng);
        let d = random_field(grid, &mut rng);
        let lhs = triple_quadrature(&a.add(&d).unwrap(), &b, &c).unwrap();
        let rhs =
            triple_quadrature(&a, &b, &c).unwrap() + triple_quadrature(&d, &b, &c).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }
}
