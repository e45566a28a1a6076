use crate::error::{Error, Result};
use crate::ode::OdeOptions;
use crate::potential::DEFAULT_DECAY_BUDGET;

/// Tolerances shared by the shooting solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverConfig {
    /// Absolute width of the final energy bracket.
    pub tol_e: f64,
    pub ode: OdeOptions,
    /// Accumulated `∫κ dx/ħ` between each turning point and its cutoff.
    pub decay_budget: f64,
    /// Largest acceptable `|w(E)|` at a converged eigenvalue.
    pub mismatch_tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol_e: 1e-8,
            ode: OdeOptions::default(),
            decay_budget: DEFAULT_DECAY_BUDGET,
            mismatch_tol: 1e-6,
            max_iterations: 200,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_e > 0.0) {
            return Err(Error::InvalidArgument("tol_e must be positive"));
        }
        if !(self.decay_budget > 0.0) {
            return Err(Error::InvalidArgument("decay budget must be positive"));
        }
        if !(self.mismatch_tol > 0.0) {
            return Err(Error::InvalidArgument("mismatch tolerance must be positive"));
        }
        self.ode.validate()
    }
}
