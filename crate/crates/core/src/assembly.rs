//! Piecewise eigenfunction assembled from the three regional solutions, and
//! tabular series for plotting.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::allowed::{self, AllowedSolution, BStarResult, LeftBoundary};
use crate::config::SolverConfig;
use crate::eigen::{self, EigenResult};
use crate::error::{Error, Result};
use crate::forbidden::ForbiddenSolution;
use crate::potential::{PhysicalConstants, PotentialSpec, TurningPoints};
use crate::quad;
use crate::reference::ClassicalAction;

/// Default number of points on an export grid.
pub const DEFAULT_EXPORT_POINTS: usize = 2001;

const NORM_ABS_TOL: f64 = 1e-14;
const NORM_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Branch {
    I,
    II,
    III,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::I => "I",
            Branch::II => "II",
            Branch::III => "III",
        })
    }
}

/// Relative discontinuities of ψ and ψ' at the two turning points.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MatchingJumps {
    pub value_x1: f64,
    pub derivative_x1: f64,
    pub value_x2: f64,
    pub derivative_x2: f64,
}

impl MatchingJumps {
    pub fn max_value(&self) -> f64 {
        self.value_x1.max(self.value_x2)
    }

    pub fn max_derivative(&self) -> f64 {
        self.derivative_x1.max(self.derivative_x2)
    }
}

/// Normalized `ψ = A_I e^{−Y_I/ħ} | A_II X'^{−½} sin(X/ħ + π/4) | A_III e^{−Y_III/ħ}`.
#[derive(Debug, Clone)]
pub struct PiecewiseWavefunction {
    n: usize,
    energy: f64,
    hbar: f64,
    tp: TurningPoints,
    left: ForbiddenSolution,
    allowed: AllowedSolution,
    right: ForbiddenSolution,
    a_i: f64,
    a_iii: f64,
    normalization: f64,
}

fn rel_jump(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

impl PiecewiseWavefunction {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn turning_points(&self) -> TurningPoints {
        self.tp
    }

    /// `b` used for branch II.
    pub fn b(&self) -> f64 {
        self.allowed.b()
    }

    /// `(x_min, x_max)`, the far-field cutoffs.
    pub fn domain(&self) -> (f64, f64) {
        (self.left.cutoff(), self.right.cutoff())
    }

    pub fn amplitudes(&self) -> [f64; 3] {
        [self.a_i, self.allowed.amplitude(), self.a_iii]
    }

    /// Factor applied to the raw amplitudes (`A_I = 1` before scaling).
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn left(&self) -> &ForbiddenSolution {
        &self.left
    }

    pub fn allowed(&self) -> &AllowedSolution {
        &self.allowed
    }

    pub fn right(&self) -> &ForbiddenSolution {
        &self.right
    }

    pub fn branch_at(&self, x: f64) -> Branch {
        if x < self.tp.x1 {
            Branch::I
        } else if x <= self.tp.x2 {
            Branch::II
        } else {
            Branch::III
        }
    }

    fn psi_i(&self, x: f64) -> f64 {
        self.a_i * self.left.psi_unit(x)
    }

    fn psi_iii(&self, x: f64) -> f64 {
        self.a_iii * self.right.psi_unit(x)
    }

    fn dpsi_i(&self, x: f64) -> f64 {
        self.a_i * self.left.psi_unit_derivative(x)
    }

    fn dpsi_iii(&self, x: f64) -> f64 {
        self.a_iii * self.right.psi_unit_derivative(x)
    }

    /// ψ(x); zero outside the domain.
    pub fn psi(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return 0.0;
        }
        match self.branch_at(x) {
            Branch::I => self.psi_i(x),
            Branch::II => self.allowed.psi(x),
            Branch::III => self.psi_iii(x),
        }
    }

    pub fn psi_derivative(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return 0.0;
        }
        match self.branch_at(x) {
            Branch::I => self.dpsi_i(x),
            Branch::II => self.allowed.psi_derivative(x),
            Branch::III => self.dpsi_iii(x),
        }
    }

    /// Each branch evaluated at the two turning points and compared.
    pub fn jumps(&self) -> MatchingJumps {
        let TurningPoints { x1, x2 } = self.tp;
        MatchingJumps {
            value_x1: rel_jump(self.psi_i(x1), self.allowed.psi(x1)),
            derivative_x1: rel_jump(self.dpsi_i(x1), self.allowed.psi_derivative(x1)),
            value_x2: rel_jump(self.psi_iii(x2), self.allowed.psi(x2)),
            derivative_x2: rel_jump(self.dpsi_iii(x2), self.allowed.psi_derivative(x2)),
        }
    }

    /// `∫ψ²` over the domain, branch by branch.
    pub fn norm_squared(&self) -> f64 {
        norm_squared_parts(&self.left, &self.allowed, &self.right, self.a_i, self.a_iii)
    }

    /// Zeros of ψ_II.
    pub fn node_positions(&self) -> Vec<f64> {
        self.allowed.node_positions()
    }

    /// Flips the global sign.
    pub fn negate(&mut self) {
        self.a_i = -self.a_i;
        self.a_iii = -self.a_iii;
        self.allowed.scale_amplitude(-1.0);
    }

    /// Flips the global sign if ψ just right of `x1` disagrees in sign with
    /// `reference` there.
    pub fn align_sign_with<F: Fn(f64) -> f64>(&mut self, reference: F) {
        let x = self.tp.x1 + 1e-3 * self.tp.width();
        if self.psi(x) * reference(x) < 0.0 {
            self.negate();
        }
    }
}

fn norm_squared_parts(
    left: &ForbiddenSolution,
    allowed: &AllowedSolution,
    right: &ForbiddenSolution,
    a_i: f64,
    a_iii: f64,
) -> f64 {
    let tp = allowed.turning_points();
    let i = quad::integrate(
        |x| {
            let p = a_i * left.psi_unit(x);
            p * p
        },
        left.cutoff(),
        tp.x1,
        NORM_ABS_TOL,
        NORM_REL_TOL,
    );
    let ii = quad::integrate(
        |x| {
            let p = allowed.psi(x);
            p * p
        },
        tp.x1,
        tp.x2,
        NORM_ABS_TOL,
        NORM_REL_TOL,
    );
    let iii = quad::integrate(
        |x| {
            let p = a_iii * right.psi_unit(x);
            p * p
        },
        tp.x2,
        right.cutoff(),
        NORM_ABS_TOL,
        NORM_REL_TOL,
    );
    i.value + ii.value + iii.value
}

/// Builds and normalizes the eigenfunction of a converged level with branch
/// II integrated at `b`.
pub fn assemble(
    eigen: &EigenResult,
    b: f64,
    spec: &PotentialSpec,
    consts: &PhysicalConstants,
    cfg: &SolverConfig,
) -> Result<PiecewiseWavefunction> {
    if !(b > 0.0) {
        return Err(Error::NonpositiveB { b });
    }
    let shot = eigen::shoot(eigen.energy, Some(b), spec, consts, cfg)?;
    let a_i = 1.0;
    // ψ_III(x2) = A_III since Y_III(x2) = 0.
    let a_iii = shot.psi_x2;
    let mut allowed = shot.allowed;
    let norm2 = norm_squared_parts(&shot.left, &allowed, &shot.right, a_i, a_iii);
    if !(norm2 > 0.0 && norm2.is_finite()) {
        return Err(Error::NaNMismatch { energy: eigen.energy });
    }
    let c = 1.0 / libm::sqrt(norm2);
    allowed.scale_amplitude(c);
    Ok(PiecewiseWavefunction {
        n: eigen.n,
        energy: eigen.energy,
        hbar: consts.hbar,
        tp: shot.turning_points,
        left: shot.left,
        allowed,
        right: shot.right,
        a_i: a_i * c,
        a_iii: a_iii * c,
        normalization: c,
    })
}

/// `b*` at the converged energy of `eigen`.
pub fn b_star_for(
    eigen: &EigenResult,
    spec: &PotentialSpec,
    consts: &PhysicalConstants,
    cfg: &SolverConfig,
) -> Result<BStarResult> {
    let shot = eigen::shoot(eigen.energy, None, spec, consts, cfg)?;
    let boundary = LeftBoundary { psi: 1.0, log_derivative: shot.left.log_derivative_at_tp() };
    allowed::find_b_star(eigen.energy, eigen.n, spec, consts, &shot.turning_points, &boundary, &cfg.ode)
}

/// Zeros of the assembled ψ, i.e. the solutions of `X = (k − ¼)πħ`.
pub fn node_positions(wf: &PiecewiseWavefunction) -> Vec<f64> {
    wf.node_positions()
}

/// Which curves [`export_series`] emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SeriesSelector {
    /// `psi`, `psi_derivative`.
    Psi,
    /// `X`, `W_C`.
    ActionReal,
    /// `Y`.
    ActionImag,
    /// `X'`, `p_c`.
    Momentum,
    /// `sine_factor`, `inv_sqrt_phase_derivative`.
    Envelope,
}

impl SeriesSelector {
    pub const ALL: [SeriesSelector; 5] = [
        SeriesSelector::Psi,
        SeriesSelector::ActionReal,
        SeriesSelector::ActionImag,
        SeriesSelector::Momentum,
        SeriesSelector::Envelope,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SeriesSelector::Psi => "psi",
            SeriesSelector::ActionReal => "action_real",
            SeriesSelector::ActionImag => "action_imag",
            SeriesSelector::Momentum => "momentum",
            SeriesSelector::Envelope => "envelope",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            SeriesSelector::Psi => &["psi", "psi_derivative"],
            SeriesSelector::ActionReal => &["X", "W_C"],
            SeriesSelector::ActionImag => &["Y"],
            SeriesSelector::Momentum => &["X_prime", "p_c"],
            SeriesSelector::Envelope => &["sine_factor", "inv_sqrt_X_prime"],
        }
    }

    /// Whether branch II must be integrated at `b*`.
    pub fn requires_b_star(self) -> bool {
        !matches!(self, SeriesSelector::Psi)
    }
}

impl fmt::Display for SeriesSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SeriesSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SeriesSelector::ALL
            .into_iter()
            .find(|sel| sel.name() == s)
            .ok_or(Error::InvalidArgument("unknown series selector"))
    }
}

/// One grid point; `None` marks a quantity that is not real-valued in
/// that branch.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeriesRow {
    pub x: f64,
    pub branch: Branch,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Series {
    pub selector: SeriesSelector,
    /// Names of the value columns (after `x` and `branch`).
    pub columns: Vec<String>,
    pub rows: Vec<SeriesRow>,
}

impl Series {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let c = self.columns.iter().position(|s| s == name)?;
        Some(self.rows.iter().map(|r| r.values[c]).collect())
    }
}

/// Samples one selector on `points` uniform points across the domain.
///
/// Real-part quantities (`X`, `W_C`, `X'`, `p_c`, the sine factor and
/// `1/√X'`) are only emitted in branch II. `Y` is `ħ log(√X'/|A_II|)` in
/// branch II and `Y − ħ log A` in the forbidden branches, so `e^{−Y/ħ}` is
/// the local amplitude everywhere.
pub fn export_series(
    wf: &PiecewiseWavefunction,
    b_star: Option<&BStarResult>,
    classical: Option<&ClassicalAction>,
    selector: SeriesSelector,
    points: usize,
) -> Result<Series> {
    if points < 2 {
        return Err(Error::InvalidArgument("export grid needs at least two points"));
    }
    if selector.requires_b_star() {
        let bs = b_star.ok_or(Error::SelectorRequiresBStar(selector.name()))?;
        if (wf.b() - bs.b_star).abs() > 1e-12 * bs.b_star {
            return Err(Error::SelectorRequiresBStar(selector.name()));
        }
    }
    let classical = match selector {
        SeriesSelector::ActionReal | SeriesSelector::Momentum => {
            Some(classical.ok_or(Error::InvalidArgument("selector needs the classical action"))?)
        }
        _ => None,
    };
    let (lo, hi) = wf.domain();
    let step = (hi - lo) / (points - 1) as f64;
    let hbar = wf.hbar;
    let mut rows = Vec::with_capacity(points);
    for i in 0..points {
        let x = if i + 1 == points { hi } else { lo + step * i as f64 };
        let branch = wf.branch_at(x);
        let inside = branch == Branch::II;
        let al = &wf.allowed;
        let values = match selector {
            SeriesSelector::Psi => alloc::vec![Some(wf.psi(x)), Some(wf.psi_derivative(x))],
            SeriesSelector::ActionReal => {
                let cl = classical.expect("checked above");
                if inside {
                    alloc::vec![Some(al.phase(x)), Some(cl.at(x))]
                } else {
                    alloc::vec![None, None]
                }
            }
            SeriesSelector::ActionImag => {
                let y = match branch {
                    Branch::I => wf.left.y(x) - hbar * libm::log(wf.a_i.abs()),
                    Branch::II => al.imaginary_part(x),
                    Branch::III => wf.right.y(x) - hbar * libm::log(wf.a_iii.abs()),
                };
                alloc::vec![Some(y)]
            }
            SeriesSelector::Momentum => {
                let cl = classical.expect("checked above");
                if inside {
                    alloc::vec![Some(al.phase_derivative(x)), Some(cl.momentum(x)?)]
                } else {
                    alloc::vec![None, None]
                }
            }
            SeriesSelector::Envelope => {
                if inside {
                    alloc::vec![Some(al.sine_factor(x)), Some(al.envelope(x))]
                } else {
                    alloc::vec![None, None]
                }
            }
        };
        rows.push(SeriesRow { x, branch, values });
    }
    Ok(Series {
        selector,
        columns: selector.columns().iter().map(|s| String::from(*s)).collect(),
        rows,
    })
}
