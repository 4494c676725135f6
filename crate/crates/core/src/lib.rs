//! Forward and inverse resonance computations for one-dimensional
//! Schrödinger operators `−y'' + q y = z² y` on the half line, where `q`
//! differs from an algebro-geometric base potential `q₀` on `[0, R]` only.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod format;
pub mod inverse;
pub mod jost;
pub mod kernel;
pub mod numeric;
pub mod potential;
pub mod roots;

pub use error::{Error, Result};
pub use numeric::C64;
