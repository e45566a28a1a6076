use core::fmt;

/// Errors produced by the solvers.
///
/// Variants that originate at a specific coordinate carry it, so a caller
/// can tell where an integration broke down.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("energy {energy} is not above the potential minimum {minimum}")]
    EnergyBelowMinimum { energy: f64, minimum: f64 },

    #[error("potential crosses the energy {sign_changes} times; only single wells are supported")]
    MultipleWells { sign_changes: usize },

    #[error("no far-field cutoff found on the {side} side within the scan range")]
    CutoffSearchFailed { side: Side },

    #[error("step size underflow at x = {x}")]
    StepSizeUnderflow { x: f64 },

    #[error("vector field is not finite at x = {x}")]
    NonFiniteField { x: f64 },

    #[error("decaying branch lost in the forbidden region at x = {x}")]
    WrongBranch { x: f64 },

    #[error("phase derivative X' vanished at x = {x}")]
    PhaseDerivativeVanished { x: f64 },

    #[error("phase-derivative parameter b must be positive, got {b}")]
    NonpositiveB { b: f64 },

    #[error("no bracket found for {what}")]
    BracketNotFound { what: &'static str },

    #[error("matching function is NaN at E = {energy}")]
    NaNMismatch { energy: f64 },

    #[error("converged root has {found} nodes, expected {expected}")]
    NodeCountMismatch { expected: usize, found: usize },

    #[error("x = {x} lies outside the classically allowed region")]
    OutsideAllowedRegion { x: f64 },

    #[error("series selector `{0}` needs the b* solution")]
    SelectorRequiresBStar(&'static str),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Which side of the well an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

impl Error {
    /// Stable machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidPotential(_) => "InvalidPotential",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::EnergyBelowMinimum { .. } => "EnergyBelowMinimum",
            Error::MultipleWells { .. } => "MultipleWells",
            Error::CutoffSearchFailed { .. } => "CutoffSearchFailed",
            Error::StepSizeUnderflow { .. } => "StepSizeUnderflow",
            Error::NonFiniteField { .. } => "NonFiniteField",
            Error::WrongBranch { .. } => "WrongBranch",
            Error::PhaseDerivativeVanished { .. } => "PhaseDerivativeVanished",
            Error::NonpositiveB { .. } => "NonpositiveB",
            Error::BracketNotFound { .. } => "BracketNotFound",
            Error::NaNMismatch { .. } => "NaNMismatch",
            Error::NodeCountMismatch { .. } => "NodeCountMismatch",
            Error::OutsideAllowedRegion { .. } => "OutsideAllowedRegion",
            Error::SelectorRequiresBStar(_) => "SelectorRequiresBStar",
        }
    }
}
