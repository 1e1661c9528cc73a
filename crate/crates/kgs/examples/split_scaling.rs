//! Low/high frequency splitting of rough data and its norm scaling.
//!
//! Generates data of limited Sobolev regularity s, splits it at a sweep of
//! frequency cutoffs N into a smooth low part and a small rough high part,
//! and fits the power laws: the high part's L2 norm should decay like
//! N^{-s}, the low part's higher norm should grow like N^{l-s}.
//!
//! Run with: cargo run --release --example split_scaling

use kgs::decomposition::{generate_rough_data, verify_split_scaling, RoughStyle};
use kgs::Grid;

fn main() -> kgs::Result<()> {
    let grid = Grid::standard(3, 64)?;
    let s = 0.75;
    let l = 1.0;
    let sweep = [4.0, 8.0, 16.0, 32.0];

    let seeds: Vec<u64> = (0..8).collect();
    let mut low = 0.0;
    let mut high = 0.0;
    println!("data regularity s = {s}, low-part norm exponent l = {l}");
    for &seed in &seeds {
        let f = generate_rough_data(grid, s, seed, RoughStyle::Random)?;
        // Low-part growth shows in H^l; high-part decay shows in L2.
        let grow = verify_split_scaling(&f, s, l, &sweep)?;
        let decay = verify_split_scaling(&f, s, 0.0, &sweep)?;
        println!(
            "  seed {seed}: low H^{l} slope {:+.3} (expected {:+.3}), high L2 slope {:+.3} (expected {:+.3})",
            grow.slope_low.slope, grow.expected_slope, decay.slope_high.slope, -s
        );
        low += grow.slope_low.slope;
        high += decay.slope_high.slope;
    }
    let k = seeds.len() as f64;
    println!();
    println!("mean low slope  {:+.3}  (predicted {:+.3})", low / k, l - s);
    println!("mean high slope {:+.3}  (predicted {:+.3})", high / k, -s);
    Ok(())
}
