//! Nonlinear split-step evolution with conserved-quantity tracking.
//!
//! Integrates the coupled Schrodinger / Klein-Gordon system from smooth
//! random data and prints the drift of mass (exactly conserved by the
//! splitting) and energy (conserved to the order of the method).
//!
//! Run with: cargo run --release --example conservation_laws

use kgs::evolution::strang_step;
use kgs::model::{energy, random_smooth_state, to_first_order, to_second_order};
use kgs::Grid;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> kgs::Result<()> {
    let grid = Grid::standard(3, 16)?;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let state = random_smooth_state(grid, &mut rng)?;

    let h = 1e-3;
    let steps = 1000;
    let q0 = energy(&state)?;
    println!(
        "t = {:.3}   mass = {:.12}   energy = {:.12}",
        0.0, q0.mass, q0.energy
    );

    let mut first = to_first_order(&state)?;
    for i in 1..=steps {
        first = strang_step(&first, h, true)?;
        if i % 200 == 0 {
            let q = energy(&to_second_order(&first)?)?;
            println!(
                "t = {:.3}   mass = {:.12}   energy = {:.12}",
                first.time, q.mass, q.energy
            );
        }
    }

    let q1 = energy(&to_second_order(&first)?)?;
    println!();
    println!(
        "relative mass drift   {:.3e}",
        (q1.mass - q0.mass).abs() / q0.mass
    );
    println!(
        "relative energy drift {:.3e}",
        (q1.energy - q0.energy).abs() / q0.energy.abs()
    );
    Ok(())
}
