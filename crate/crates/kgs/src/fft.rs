//! Cached FFT plans and multi-dimensional transforms.
//!
//! Plans are shared behind a mutex-protected map; the `Fft` handles themselves
//! are `Send + Sync`, so concurrent transforms on distinct buffers are safe.

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

static PLANS: Lazy<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut plans = PLANS.lock().unwrap();
    plans
        .entry((len, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            let dir = if inverse {
                FftDirection::Inverse
            } else {
                FftDirection::Forward
            };
            planner.plan_fft(len, dir)
        })
        .clone()
}

/// Unnormalized DFT along every axis of a row-major hypercube with `dim` axes
/// of size `n`. Forward computes sums against `e^{-2\pi i jk/n}`, inverse
/// against `e^{+2\pi i jk/n}`; neither divides by `n`.
pub fn transform_nd(data: &mut [Complex64], dim: usize, n: usize, inverse: bool) {
    debug_assert_eq!(data.len(), n.pow(dim as u32));
    let fft = plan(n, inverse);
    let mut line = vec![Complex64::default(); n];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        let repeat = n.pow(axis as u32);
        for r in 0..repeat {
            let block = r * n * stride;
            for s in 0..stride {
                if stride == 1 {
                    fft.process(&mut data[block..block + n]);
                } else {
                    for (i, slot) in line.iter_mut().enumerate() {
                        *slot = data[block + i * stride + s];
                    }
                    fft.process(&mut line);
                    for (i, slot) in line.iter().enumerate() {
                        data[block + i * stride + s] = *slot;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_then_inverse_is_n_to_the_d() {
        let n = 8;
        let dim = 2;
        let mut data: Vec<Complex64> = (0..n * n)
            .map(|i| Complex64::new(i as f64 * 0.37 - 1.0, (i as f64).sin()))
            .collect();
        let orig = data.clone();
        transform_nd(&mut data, dim, n, false);
        transform_nd(&mut data, dim, n, true);
        let scale = (n * n) as f64;
        for (a, b) in data.iter().zip(&orig) {
            assert!((a / scale - b).norm() < 1e-12);
        }
    }

    #[test]
    fn matches_direct_dft_in_1d() {
        let n = 8;
        let mut data: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64).cos(), 0.3 * i as f64))
            .collect();
        let orig = data.clone();
        transform_nd(&mut data, 1, n, false);
        for k in 0..n {
            let mut acc = Complex64::default();
            for (j, v) in orig.iter().enumerate() {
                let phase = -2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64;
                acc += v * Complex64::from_polar(1.0, phase);
            }
            assert!((data[k] - acc).norm() < 1e-10);
        }
    }
}
