//! Sweeps the dyadic bilinear product measurement over the Schrodinger block
//! index `l` at fixed Klein-Gordon block `m` and fits the decay rate of the
//! normalized space-time product norm, comparing it against the `2^{m - l/2}`
//! product bound.

use kgs::dyadic::DyadicIndex;
use kgs::evolution::Sign;
use kgs::probes::{bilinear_probe, fit_slope};
use kgs::Grid;

fn main() -> kgs::Result<()> {
    let grid = Grid::standard(3, 64)?;
    let t_window = 8.0;
    let samples = 24;
    let m = DyadicIndex(2);
    let seeds: Vec<u64> = (0..4).map(|s| 1000 + s).collect();

    println!("grid d=3 n=64, T_w={t_window}, samples={samples}, m={}", m.0);
    println!("{:>3} {:>14} {:>14}", "l", "ratio(geo)", "bound_factor");
    let mut ratio_pts = Vec::new();
    let mut bound_pts = Vec::new();
    for l in [3u32, 4, 5] {
        let mut log_ratio = 0.0;
        let mut log_bound = 0.0;
        for &seed in &seeds {
            let p = bilinear_probe(grid, DyadicIndex(l), m, Sign::Plus, t_window, samples, seed)?;
            log_ratio += p.ratio.ln();
            log_bound += p.bound_factor.ln();
        }
        let ratio = (log_ratio / seeds.len() as f64).exp();
        let bound = (log_bound / seeds.len() as f64).exp();
        println!("{l:>3} {ratio:>14.6e} {bound:>14.6e}");
        ratio_pts.push((2f64.powi(l as i32), ratio));
        bound_pts.push((2f64.powi(l as i32), bound));
    }
    let rfit = fit_slope(&ratio_pts)?;
    let bfit = fit_slope(&bound_pts)?;
    println!("ratio slope {:.4} (r2 {:.3})", rfit.slope, rfit.r2);
    println!("bound_factor slope {:.4} (r2 {:.3})", bfit.slope, bfit.r2);
    Ok(())
}
