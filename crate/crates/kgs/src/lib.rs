//! Pseudospectral solver and experiment harness for the coupled
//! Schrodinger / Klein-Gordon (Yukawa) system on a periodic box.

pub mod config;
pub mod decomposition;
pub mod driver;
pub mod duhamel;
pub mod dyadic;
pub mod error;
pub mod evolution;
pub mod experiment;
mod fft;
pub mod field;
pub mod grid;
pub mod model;
pub mod multiplier;
pub mod probes;
pub mod snapshot;

pub use error::{Error, Result};
pub use field::{ComplexField, RealField};
pub use grid::Grid;
