//! Integral-equation solve of one local interval.
//!
//! Splits rough data from a smooth context, solves the interaction
//! (Duhamel) integral equations for the rough corrections by Picard
//! iteration, and checks the decomposition against a direct high-resolution
//! integration of the full system: context + free rough flow + corrections
//! must agree with evolving the sum directly.
//!
//! Run with: cargo run --release --example interval_picard

use kgs::decomposition::{
    generate_rough_data, generate_rough_real, generate_rough_velocity, split_data,
    RegularityParams, RoughStyle,
};
use kgs::driver::{interval_length, run_interval, IntervalCtrl};
use kgs::evolution::{oracle_integrate, state_distance, StepControl};
use kgs::model::{to_first_order, SecondOrderState};
use kgs::Grid;

fn main() -> kgs::Result<()> {
    let grid = Grid::standard(3, 16)?;
    let params = RegularityParams::new(0.75, 0.75, 4.0, 0.05)?;
    let length = interval_length(&params);
    println!("cutoff N = {}, interval length |I| = {length:.4}", params.n_cut);

    let psi0 = generate_rough_data(grid, params.s, 1, RoughStyle::Random)?;
    let phi0 = generate_rough_real(grid, params.m, 2, RoughStyle::Random)?;
    let phi1 = generate_rough_velocity(grid, params.m, 3, RoughStyle::Random)?;
    let split = split_data(&psi0, &phi0, &phi1, params)?;

    let regular0 = to_first_order(&SecondOrderState::new(
        split.psi01, split.phi01, split.phi11, 0.0,
    )?)?;
    let rough0 = to_first_order(&SecondOrderState::new(
        split.psi02, split.phi02, split.phi12, 0.0,
    )?)?;

    let ctrl = IntervalCtrl { substeps: 128, ..IntervalCtrl::default() };
    let (regular1, rough1, record) = run_interval(&regular0, &rough0, length, &ctrl)?;

    println!();
    println!("rough corrections after one interval:");
    println!("  ||w||_H1 = {:.4e}   ||w||_L2 = {:.4e}", record.w_h1, record.w_l2);
    println!("  ||z||_H1 = {:.4e}   ||z||_L2 = {:.4e}", record.z_h1, record.z_l2);
    println!("  free rough flow ||psi02(free)||_H1 = {:.4e}", record.rough_h1_free);
    println!("  energy increment of the regular part = {:+.4e}", record.energy_increment);

    // Direct integration of the summed data at fine resolution.
    let full0 = kgs::model::FirstOrderState {
        psi: regular0.psi.add(&rough0.psi)?,
        phi_plus: regular0.phi_plus.add(&rough0.phi_plus)?,
        phi_minus: regular0.phi_minus.add(&rough0.phi_minus)?,
        time: 0.0,
    };
    let fine = StepControl::new(length / 2048.0, length)?;
    let direct = oracle_integrate(&full0, &fine, true)?;
    let recombined = kgs::model::FirstOrderState {
        psi: regular1.psi.add(&rough1.psi)?,
        phi_plus: regular1.phi_plus.add(&rough1.phi_plus)?,
        phi_minus: regular1.phi_minus.add(&rough1.phi_minus)?,
        time: direct.time,
    };
    println!();
    println!(
        "relative distance (regular + rough) vs direct integration: {:.3e}",
        state_distance(&recombined, &direct)?
    );
    Ok(())
}
