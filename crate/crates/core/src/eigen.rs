//! Shooting eigensolver built on the three-region construction.
//!
//! For a trial energy the forbidden branches are integrated from their
//! cutoffs, the allowed-region phase is started at `x1` so that ψ and ψ'
//! match the left branch, and the right branch is value-matched at `x2`.
//! `E` is an eigenvalue when ψ' then also matches at `x2`, i.e. when the
//! Wronskian of ψ_II and the unit-amplitude ψ_III vanishes there.

use crate::allowed::{self, AllowedSolution, LeftBoundary};
use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::forbidden::{self, ForbiddenRegion, ForbiddenSolution};
use crate::potential::{far_field_cutoffs, find_turning_points, PhysicalConstants, PotentialSpec, TurningPoints};
use crate::reference::wkb_energy;
use crate::roots;

/// Converged eigenvalue and diagnostics.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EigenResult {
    pub n: usize,
    pub energy: f64,
    pub turning_points: TurningPoints,
    pub mismatch_residual: f64,
    /// Phase-derivative parameter used while shooting.
    pub b_used: f64,
    /// Final energy bracket.
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub function_evaluations: usize,
}

/// Everything computed for one trial energy.
#[derive(Debug, Clone)]
pub struct Shot {
    pub energy: f64,
    pub turning_points: TurningPoints,
    pub cutoffs: (f64, f64),
    pub left: ForbiddenSolution,
    pub right: ForbiddenSolution,
    pub allowed: AllowedSolution,
    /// Scaled Wronskian at `x2`.
    pub w: f64,
    pub psi_x2: f64,
    pub dpsi_x2: f64,
}

impl Shot {
    /// Sign changes of ψ_II inside `(x1, x2)`.
    pub fn allowed_nodes(&self) -> usize {
        self.allowed.node_count()
    }

    /// Zeros of the left-decaying solution on the whole axis, i.e. the
    /// number of eigenvalues below this energy: the allowed-region nodes
    /// plus one more when the continuation past `x2` must cross zero (its
    /// Wronskian with the decaying branch has the opposite sign to ψ(x2)).
    pub fn sturm_index(&self) -> usize {
        self.allowed_nodes() + usize::from(self.w * self.psi_x2 < 0.0)
    }
}

/// Builds ψ_I, ψ_II (value- and slope-matched at `x1`, `A_I = 1`) and the
/// unit-amplitude ψ_III for a trial energy. `b = None` uses
/// [`allowed::default_b`].
pub fn shoot(
    energy: f64,
    b: Option<f64>,
    spec: &PotentialSpec,
    consts: &PhysicalConstants,
    cfg: &SolverConfig,
) -> Result<Shot> {
    let tp = find_turning_points(spec, energy)?;
    let cutoffs = far_field_cutoffs(spec, consts, energy, &tp, cfg.decay_budget)?;
    let left = forbidden::solve_region(ForbiddenRegion::I, energy, spec, consts, cutoffs, &tp, &cfg.ode)?;
    let right = forbidden::solve_region(ForbiddenRegion::III, energy, spec, consts, cutoffs, &tp, &cfg.ode)?;
    let b = b.unwrap_or_else(|| allowed::default_b(energy, spec, consts, &tp));
    let boundary = LeftBoundary { psi: 1.0, log_derivative: left.log_derivative_at_tp() };
    let m = allowed::match_at_left(b, boundary.psi, boundary.log_derivative, consts)?;
    let allowed = allowed::integrate_allowed(energy, b, spec, consts, &tp, &m, &cfg.ode)?;

    let psi_x2 = allowed.psi(tp.x2);
    let dpsi_x2 = allowed.psi_derivative(tp.x2);
    let d3 = right.log_derivative_at_tp();
    let w = (dpsi_x2 - psi_x2 * d3) / ((psi_x2 * d3).abs() + dpsi_x2.abs() + f64::MIN_POSITIVE);
    if w.is_nan() {
        return Err(Error::NaNMismatch { energy });
    }
    Ok(Shot { energy, turning_points: tp, cutoffs, left, right, allowed, w, psi_x2, dpsi_x2 })
}

/// Scaled Wronskian `w(E)` at `x2`; zero exactly at eigenvalues.
pub fn mismatch(energy: f64, b: f64, spec: &PotentialSpec, consts: &PhysicalConstants, cfg: &SolverConfig) -> Result<f64> {
    Ok(shoot(energy, Some(b), spec, consts, cfg)?.w)
}

/// Nodes of ψ_II in `(x1, x2)` for `(E, b)`.
pub fn count_nodes(energy: f64, b: f64, spec: &PotentialSpec, consts: &PhysicalConstants, cfg: &SolverConfig) -> Result<usize> {
    Ok(shoot(energy, Some(b), spec, consts, cfg)?.allowed_nodes())
}

struct Counter<'a> {
    spec: &'a PotentialSpec,
    consts: &'a PhysicalConstants,
    cfg: &'a SolverConfig,
    b: Option<f64>,
    evaluations: usize,
}

impl Counter<'_> {
    fn shot(&mut self, e: f64) -> Result<Shot> {
        self.evaluations += 1;
        shoot(e, self.b, self.spec, self.consts, self.cfg)
    }

    fn index(&mut self, e: f64) -> Result<usize> {
        Ok(self.shot(e)?.sturm_index())
    }
}

/// Energy interval containing exactly the `n`-th level, with `w` changing
/// sign across it.
pub fn bracket(
    n: usize,
    spec: &PotentialSpec,
    consts: &PhysicalConstants,
    hint: Option<f64>,
    cfg: &SolverConfig,
) -> Result<(f64, f64)> {
    let mut counter = Counter { spec, consts, cfg, b: None, evaluations: 0 };
    bracket_counted(n, hint, &mut counter).map(|(lo, hi, _, _)| (lo, hi))
}

fn bracket_counted(n: usize, hint: Option<f64>, c: &mut Counter<'_>) -> Result<(f64, f64, f64, f64)> {
    let (_, v_min) = c.spec.minimum();
    let (guess, mut spacing) = match hint {
        Some(h) if h > v_min => (h, 0.1 * (h - v_min)),
        _ => {
            let e_n = wkb_energy(c.spec, c.consts, n)?;
            let above = wkb_energy(c.spec, c.consts, n + 1)? - e_n;
            let below = if n > 0 { e_n - wkb_energy(c.spec, c.consts, n - 1)? } else { e_n - v_min };
            (e_n, above.min(below))
        }
    };
    let floor = |e: f64| e.max(v_min + 1e-9 * (guess - v_min));
    let mut lo = floor(guess - 0.5 * spacing);
    let mut hi = guess + 0.5 * spacing;

    let mut guard = 0;
    while c.index(lo)? > n {
        hi = lo;
        lo = floor(v_min + 0.5 * (lo - v_min));
        guard += 1;
        if guard > 60 {
            return Err(Error::BracketNotFound { what: "eigenvalue (lower side)" });
        }
    }
    while c.index(hi)? <= n {
        lo = hi;
        hi += spacing;
        spacing *= 2.0;
        guard += 1;
        if guard > 120 {
            return Err(Error::BracketNotFound { what: "eigenvalue (upper side)" });
        }
    }
    // Narrow on the Sturm index until exactly one level is enclosed.
    let mut lo_shot = c.shot(lo)?;
    let mut hi_shot = c.shot(hi)?;
    for _ in 0..200 {
        if lo_shot.sturm_index() == n && hi_shot.sturm_index() == n + 1 {
            if lo_shot.w * hi_shot.w < 0.0 {
                return Ok((lo, hi, lo_shot.w, hi_shot.w));
            }
            return Err(Error::BracketNotFound { what: "eigenvalue (no sign change of w)" });
        }
        let mid = 0.5 * (lo + hi);
        let s = c.shot(mid)?;
        if s.sturm_index() <= n {
            lo = mid;
            lo_shot = s;
        } else {
            hi = mid;
            hi_shot = s;
        }
    }
    Err(Error::BracketNotFound { what: "eigenvalue (Sturm refinement)" })
}

/// Converges the level with `n` nodes to an energy bracket of width
/// `cfg.tol_e`.
pub fn solve(n: usize, spec: &PotentialSpec, consts: &PhysicalConstants, cfg: &SolverConfig) -> Result<EigenResult> {
    solve_with_hint(n, spec, consts, None, cfg)
}

pub fn solve_with_hint(
    n: usize,
    spec: &PotentialSpec,
    consts: &PhysicalConstants,
    hint: Option<f64>,
    cfg: &SolverConfig,
) -> Result<EigenResult> {
    solve_at(n, spec, consts, hint, None, cfg)
}

/// As [`solve_with_hint`], shooting with a fixed `b` instead of the
/// energy-dependent default.
pub fn solve_at(
    n: usize,
    spec: &PotentialSpec,
    consts: &PhysicalConstants,
    hint: Option<f64>,
    b: Option<f64>,
    cfg: &SolverConfig,
) -> Result<EigenResult> {
    cfg.validate()?;
    if let Some(b) = b {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::NonpositiveB { b });
        }
    }
    let mut counter = Counter { spec, consts, cfg, b, evaluations: 0 };
    let (lo, hi, wlo, whi) = bracket_counted(n, hint, &mut counter)?;
    let mut evaluations = counter.evaluations;
    let f = |e: f64| {
        evaluations += 1;
        shoot(e, b, spec, consts, cfg).map(|s| s.w)
    };
    let root = roots::brent(f, lo, hi, wlo, whi, cfg.tol_e, 0.0, cfg.max_iterations)?;
    let shot = shoot(root.x, b, spec, consts, cfg)?;
    evaluations += 1;
    let found = shot.allowed_nodes();
    if found != n {
        return Err(Error::NodeCountMismatch { expected: n, found });
    }
    Ok(EigenResult {
        n,
        energy: root.x,
        turning_points: shot.turning_points,
        mismatch_residual: shot.w.abs(),
        b_used: shot.allowed.b(),
        bracket: root.bracket,
        iterations: root.iterations,
        function_evaluations: evaluations,
    })
}
