//! Bound-state quantization of one-dimensional confining potentials through
//! the quantum Hamilton–Jacobi equation.
#![no_std]
// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod allowed;
pub mod assembly;
pub mod benchmarks;
pub mod config;
pub mod eigen;
pub mod error;
pub mod forbidden;
pub mod ode;
pub mod potential;
pub mod quad;
pub mod reference;
pub mod roots;

pub use error::{Error, Result, Side};
pub use ode::{OdeOptions, OdeProblem, Trajectory};
pub use potential::{PhysicalConstants, PotentialSpec, TurningPoints};
pub use config::SolverConfig;
pub use eigen::EigenResult;
pub use assembly::{PiecewiseWavefunction, SeriesSelector};
