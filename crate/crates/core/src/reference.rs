//! Independent checks for the Hamilton–Jacobi solvers: the classical
//! momentum and characteristic function, WKB quantization, a Numerov
//! Schrödinger shooting solver and the node-counting staircase action.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::potential::{far_field_cutoffs, find_turning_points, PhysicalConstants, PotentialSpec, TurningPoints};
use crate::quad;
use crate::roots;

/// `p_c(x) = √(2m(E − V(x)))` on the allowed interval.
#[derive(Debug, Clone)]
pub struct ClassicalMomentum {
    spec: PotentialSpec,
    consts: PhysicalConstants,
    energy: f64,
    tp: TurningPoints,
}

impl ClassicalMomentum {
    pub fn turning_points(&self) -> TurningPoints {
        self.tp
    }

    /// Exactly zero at and beyond the turning points (within a `1e-9`
    /// relative slack), where rounding would otherwise leave `√(δ)` residue.
    pub fn at(&self, x: f64) -> Result<f64> {
        let slack = 1e-9 * self.tp.width();
        if x < self.tp.x1 - slack || x > self.tp.x2 + slack {
            return Err(Error::OutsideAllowedRegion { x });
        }
        if x <= self.tp.x1 || x >= self.tp.x2 {
            return Ok(0.0);
        }
        Ok(self.unchecked(x))
    }

    fn unchecked(&self, x: f64) -> f64 {
        libm::sqrt(self.consts.kappa_squared(self.energy, self.spec.evaluate(x)).max(0.0))
    }
}

pub fn classical_momentum(spec: &PotentialSpec, consts: &PhysicalConstants, energy: f64) -> Result<ClassicalMomentum> {
    let tp = find_turning_points(spec, energy)?;
    Ok(ClassicalMomentum { spec: spec.clone(), consts: *consts, energy, tp })
}

/// Hamilton's characteristic function `W_C(x) = ∫_{x1}^{x} p_c dt`.
///
/// Within `layer_width` of either turning point the integral is taken in
/// `s` with `t = x1 + s²` (or `t = x2 − s²`), which removes the square-root
/// behaviour of `p_c`.
#[derive(Debug, Clone)]
pub struct ClassicalAction {
    momentum: ClassicalMomentum,
    layer_width: f64,
}

const ACTION_ABS_TOL: f64 = 1e-14;
const ACTION_REL_TOL: f64 = 1e-13;

impl ClassicalAction {
    pub fn new(momentum: ClassicalMomentum) -> Self {
        let layer_width = 0.25 * momentum.tp.width();
        ClassicalAction { momentum, layer_width }
    }

    pub fn with_layer_width(mut self, width: f64) -> Self {
        self.layer_width = width.clamp(0.0, 0.5 * self.momentum.tp.width());
        self
    }

    pub fn energy(&self) -> f64 {
        self.momentum.energy
    }

    pub fn turning_points(&self) -> TurningPoints {
        self.momentum.tp
    }

    pub fn momentum(&self, x: f64) -> Result<f64> {
        self.momentum.at(x)
    }

    // ∫_a^b p dt for x1 ≤ a ≤ b ≤ x2.
    fn piece(&self, a: f64, b: f64) -> f64 {
        let TurningPoints { x1, x2 } = self.momentum.tp;
        let w = self.layer_width;
        let p = |t: f64| self.momentum.unchecked(t);
        let mut total = 0.0;
        // left layer
        let (la, lb) = (a.max(x1), b.min(x1 + w));
        if lb > la {
            let f = |s: f64| p(x1 + s * s) * 2.0 * s;
            total += quad::integrate(f, libm::sqrt(la - x1), libm::sqrt(lb - x1), ACTION_ABS_TOL, ACTION_REL_TOL).value;
        }
        // middle
        let (ma, mb) = (a.max(x1 + w), b.min(x2 - w));
        if mb > ma {
            total += quad::integrate(p, ma, mb, ACTION_ABS_TOL, ACTION_REL_TOL).value;
        }
        // right layer
        let (ra, rb) = (a.max(x2 - w), b.min(x2));
        if rb > ra {
            let f = |s: f64| p(x2 - s * s) * 2.0 * s;
            total += quad::integrate(f, libm::sqrt(x2 - rb), libm::sqrt(x2 - ra), ACTION_ABS_TOL, ACTION_REL_TOL).value;
        }
        total
    }

    /// `W_C(x)`, with `x` clamped to `[x1, x2]`.
    pub fn at(&self, x: f64) -> f64 {
        let TurningPoints { x1, x2 } = self.momentum.tp;
        self.piece(x1, x.clamp(x1, x2))
    }

    /// `W_C(x2) = ∫_{x1}^{x2} p_c dx`.
    pub fn total(&self) -> f64 {
        let TurningPoints { x1, x2 } = self.momentum.tp;
        self.piece(x1, x2)
    }
}

pub fn classical_action(spec: &PotentialSpec, consts: &PhysicalConstants, energy: f64) -> Result<ClassicalAction> {
    Ok(ClassicalAction::new(classical_momentum(spec, consts, energy)?))
}

/// Solves `∫_{x1}^{x2} p_c dx = (n + ½)πħ` for `E`.
pub fn wkb_energy(spec: &PotentialSpec, consts: &PhysicalConstants, n: usize) -> Result<f64> {
    let target = (n as f64 + 0.5) * PI * consts.hbar;
    let (_, v_min) = spec.minimum();
    let f = |e: f64| -> Result<f64> {
        if e <= v_min {
            return Ok(-target);
        }
        Ok(classical_action(spec, consts, e)?.total() - target)
    };
    let mut gap = 1.0;
    let mut hi = v_min + gap;
    let mut fhi = f(hi)?;
    let mut lo = v_min;
    let mut flo = -target;
    let mut expansions = 0;
    while fhi <= 0.0 {
        lo = hi;
        flo = fhi;
        gap *= 2.0;
        hi = v_min + gap;
        fhi = f(hi)?;
        expansions += 1;
        if expansions > 200 {
            return Err(Error::BracketNotFound { what: "WKB energy" });
        }
    }
    let xtol = 1e-14 * hi.abs().max(1.0);
    Ok(roots::brent(f, lo, hi, flo, fhi, xtol, 0.0, 200)?.x)
}

/// Real part of the staircase action `ħ Arg ψ` for a real eigenfunction:
/// `πħ` times the number of nodes at or left of `x`.
#[derive(Debug, Clone)]
pub struct StaircaseAction {
    nodes: Vec<f64>,
    hbar: f64,
}

impl StaircaseAction {
    pub fn at(&self, x: f64) -> f64 {
        PI * self.hbar * self.nodes.iter().filter(|&&z| z <= x).count() as f64
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Total variation `nπħ`.
    pub fn total(&self) -> f64 {
        PI * self.hbar * self.nodes.len() as f64
    }
}

pub fn staircase_action(sol: &NumerovSolution, consts: &PhysicalConstants) -> StaircaseAction {
    StaircaseAction { nodes: sol.nodes.clone(), hbar: consts.hbar }
}

/// Decay budget used to size the Numerov box.
const NUMEROV_DECAY_BUDGET: f64 = 40.0;
/// Starting number of grid intervals before doubling.
const NUMEROV_START_INTERVALS: usize = 4096;
const NUMEROV_MAX_INTERVALS: usize = 1 << 22;
/// Grid doubling stops once the eigenvalue moves by less than this.
pub const NUMEROV_DOUBLING_TOL: f64 = 1e-9;

/// Normalized Numerov eigenfunction on a uniform grid.
#[derive(Debug, Clone)]
pub struct NumerovSolution {
    pub energy: f64,
    pub x_start: f64,
    pub step: f64,
    pub psi: Vec<f64>,
    pub nodes: Vec<f64>,
    /// `|E(h) − E(h/2)|` of the final doubling.
    pub grid_doubling_change: f64,
}

impl NumerovSolution {
    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_start + self.step * i as f64
    }

    pub fn x_end(&self) -> f64 {
        self.x(self.psi.len() - 1)
    }

    // Four-point Lagrange stencil around x.
    fn stencil(&self, x: f64) -> (usize, f64) {
        let n = self.psi.len();
        let t = (x - self.x_start) / self.step;
        let i = (libm::floor(t) as isize - 1).clamp(0, n as isize - 4) as usize;
        (i, t - i as f64)
    }

    /// Cubic interpolation of ψ.
    pub fn psi_at(&self, x: f64) -> f64 {
        let (i, u) = self.stencil(x);
        let p = &self.psi[i..i + 4];
        let l0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
        let l1 = u * (u - 2.0) * (u - 3.0) / 2.0;
        let l2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
        let l3 = u * (u - 1.0) * (u - 2.0) / 6.0;
        p[0] * l0 + p[1] * l1 + p[2] * l2 + p[3] * l3
    }

    /// Derivative of the cubic interpolant.
    pub fn derivative_at(&self, x: f64) -> f64 {
        let (i, u) = self.stencil(x);
        let p = &self.psi[i..i + 4];
        let d0 = -(3.0 * u * u - 12.0 * u + 11.0) / 6.0;
        let d1 = (3.0 * u * u - 10.0 * u + 6.0) / 2.0;
        let d2 = -(3.0 * u * u - 8.0 * u + 3.0) / 2.0;
        let d3 = (3.0 * u * u - 6.0 * u + 2.0) / 6.0;
        (p[0] * d0 + p[1] * d1 + p[2] * d2 + p[3] * d3) / self.step
    }

    /// Composite Simpson estimate of `∫ψ² dx`.
    pub fn norm_squared(&self) -> f64 {
        simpson_squared(&self.psi, self.step)
    }
}

fn simpson_squared(psi: &[f64], h: f64) -> f64 {
    let n = psi.len() - 1;
    debug_assert!(n.is_multiple_of(2));
    let mut s = psi[0] * psi[0] + psi[n] * psi[n];
    for (i, p) in psi.iter().enumerate().take(n).skip(1) {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * p * p;
    }
    s * h / 3.0
}

struct NumerovGrid<'a> {
    spec: &'a PotentialSpec,
    consts: PhysicalConstants,
    x_start: f64,
    h: f64,
    intervals: usize,
}

impl NumerovGrid<'_> {
    fn x(&self, i: usize) -> f64 {
        self.x_start + self.h * i as f64
    }

    // h²g/12 with ψ'' = gψ
    fn t(&self, i: usize, e: f64) -> f64 {
        let g = 2.0 * self.consts.mass * (self.spec.evaluate(self.x(i)) - e) / (self.consts.hbar * self.consts.hbar);
        self.h * self.h * g / 12.0
    }

    fn step(&self, prev: f64, cur: f64, tp: f64, tc: f64, tn: f64) -> f64 {
        (2.0 * (1.0 + 5.0 * tc) * cur - (1.0 - tp) * prev) / (1.0 - tn)
    }

    /// Sign changes of the left-started solution over the whole box
    /// (= number of discrete eigenvalues below `e`).
    fn sturm_count(&self, e: f64) -> usize {
        let (mut prev, mut cur) = (0.0, 1e-20);
        let (mut tp, mut tc) = (self.t(0, e), self.t(1, e));
        let mut count = 0;
        for i in 1..self.intervals {
            let tn = self.t(i + 1, e);
            let mut next = self.step(prev, cur, tp, tc, tn);
            if next.abs() > 1e200 {
                next *= 1e-200;
                cur *= 1e-200;
            }
            if next * cur < 0.0 || (next == 0.0 && i + 1 < self.intervals) {
                count += 1;
            }
            prev = cur;
            cur = next;
            tp = tc;
            tc = tn;
        }
        count
    }

    fn integrate_left(&self, e: f64, upto: usize) -> Vec<f64> {
        let mut psi = vec![0.0; upto + 1];
        psi[1] = 1e-20;
        for i in 1..upto {
            psi[i + 1] = self.step(psi[i - 1], psi[i], self.t(i - 1, e), self.t(i, e), self.t(i + 1, e));
            if psi[i + 1].abs() > 1e200 {
                psi[..=i + 1].iter_mut().for_each(|p| *p *= 1e-200);
            }
        }
        psi
    }

    // Entries below `from` are left at zero.
    fn integrate_right(&self, e: f64, from: usize) -> Vec<f64> {
        let n = self.intervals;
        let mut psi = vec![0.0; n + 1];
        psi[n - 1] = 1e-20;
        for i in (from + 1..n).rev() {
            psi[i - 1] = self.step(psi[i + 1], psi[i], self.t(i + 1, e), self.t(i, e), self.t(i - 1, e));
            if psi[i - 1].abs() > 1e200 {
                psi[i - 1..].iter_mut().for_each(|p| *p *= 1e-200);
            }
        }
        psi
    }

    /// Normalized Casoratian of the two boundary solutions at `m`, taken in
    /// the variables `(1 − h²g/12)ψ` where it is index-independent.
    fn defect(&self, e: f64, m: usize) -> f64 {
        let l = self.integrate_left(e, m + 1);
        let r = self.integrate_right(e, m - 1);
        let (a0, a1) = (1.0 - self.t(m, e), 1.0 - self.t(m + 1, e));
        let (l0, l1, r0, r1) = (a0 * l[m], a1 * l[m + 1], a0 * r[m], a1 * r[m + 1]);
        let c = l1 * r0 - r1 * l0;
        c / ((l1 * r0).abs() + (r1 * l0).abs() + f64::MIN_POSITIVE)
    }

    fn eigenvalue(&self, n: usize, e_lo: f64, e_hi: f64, tol_e: f64) -> Result<f64> {
        let (mut lo, mut hi) = (e_lo, e_hi);
        let mut gap = (hi - lo).max(1e-3);
        let mut guard = 0;
        while self.sturm_count(hi) <= n {
            lo = hi;
            hi += gap;
            gap *= 2.0;
            guard += 1;
            if guard > 100 {
                return Err(Error::BracketNotFound { what: "Numerov upper energy" });
            }
        }
        // Narrow until exactly one level lies inside.
        let (mut clo, mut chi) = (self.sturm_count(lo), self.sturm_count(hi));
        for _ in 0..200 {
            if clo == n && chi == n + 1 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let c = self.sturm_count(mid);
            if c <= n {
                lo = mid;
                clo = c;
            } else {
                hi = mid;
                chi = c;
            }
        }
        // Match where the solution is far from a node: the right turning point.
        let m = match find_turning_points(self.spec, hi) {
            Ok(tp) => (((tp.x2 - self.x_start) / self.h) as usize).clamp(2, self.intervals - 3),
            Err(_) => self.intervals / 2,
        };
        let root = roots::bisect(|e| Ok(self.defect(e, m)), lo, hi, tol_e, 400)?;
        Ok(root.x)
    }

    fn solution(&self, e: f64) -> (Vec<f64>, Vec<usize>) {
        let n = self.intervals;
        let m = match find_turning_points(self.spec, e) {
            Ok(tp) => (((tp.x2 - self.x_start) / self.h) as usize).clamp(2, n - 3),
            Err(_) => n / 2,
        };
        let l = self.integrate_left(e, m);
        let r = self.integrate_right(e, m - 1);
        let scale = l[m] / r[m];
        let mut psi: Vec<f64> = (0..=n).map(|i| if i <= m { l[i] } else { r[i] * scale }).collect();
        let norm = libm::sqrt(simpson_squared(&psi, self.h));
        psi.iter_mut().for_each(|p| *p /= norm);
        let mut nodes = Vec::new();
        for i in 1..n - 1 {
            let (a, b) = (psi[i], psi[i + 1]);
            if a * b < 0.0 || (b == 0.0 && psi[i + 2] * a < 0.0) {
                nodes.push(i);
            }
        }
        (psi, nodes)
    }
}

struct NumerovBox {
    x_start: f64,
    x_end: f64,
    e_n: f64,
    e_up: f64,
    v_min: f64,
}

// Walls placed where a level two WKB spacings above `E_n` has decayed by
// `e^{-40}`.
fn numerov_box(spec: &PotentialSpec, consts: &PhysicalConstants, n: usize) -> Result<NumerovBox> {
    let e_n = wkb_energy(spec, consts, n)?;
    let e_up = wkb_energy(spec, consts, n + 1)?;
    let (_, v_min) = spec.minimum();
    let e_box = e_up + (e_up - e_n);
    let tp_box = find_turning_points(spec, e_box)?;
    let (x_start, x_end) = far_field_cutoffs(spec, consts, e_box, &tp_box, NUMEROV_DECAY_BUDGET)?;
    Ok(NumerovBox { x_start, x_end, e_n, e_up, v_min })
}

/// Numerov eigenvalue on one grid of `intervals` steps over the same box as
/// [`numerov_solve`], without grid doubling.
pub fn numerov_eigenvalue_on_grid(
    spec: &PotentialSpec,
    consts: &PhysicalConstants,
    n: usize,
    intervals: usize,
    tol_e: f64,
) -> Result<f64> {
    if intervals < 8 || !(tol_e > 0.0) {
        return Err(Error::InvalidArgument("need at least 8 intervals and a positive tolerance"));
    }
    let NumerovBox { x_start, x_end, e_n, e_up, v_min } = numerov_box(spec, consts, n)?;
    let grid = NumerovGrid { spec, consts: *consts, x_start, h: (x_end - x_start) / intervals as f64, intervals };
    grid.eigenvalue(n, v_min + 1e-12 * (e_n - v_min), e_up, tol_e)
}

/// Numerov shooting on a box sized from WKB estimates, with `ψ = 0` at both
/// walls, refined by grid doubling until the eigenvalue moves less than
/// [`NUMEROV_DOUBLING_TOL`].
pub fn numerov_solve(spec: &PotentialSpec, consts: &PhysicalConstants, n: usize, tol_e: f64) -> Result<NumerovSolution> {
    if !(tol_e > 0.0) {
        return Err(Error::InvalidArgument("tol_e must be positive"));
    }
    let NumerovBox { x_start, x_end, e_n, e_up, v_min } = numerov_box(spec, consts, n)?;

    // The bisection must resolve E well below the doubling tolerance, or
    // the doubling test only sees bisection noise.
    let tol_e = tol_e.min(1e-3 * NUMEROV_DOUBLING_TOL * e_up.abs().max(1.0));
    let mut intervals = NUMEROV_START_INTERVALS;
    let mut bracket = (v_min + 1e-12 * (e_n - v_min), e_up);
    let mut previous: Option<f64> = None;
    loop {
        let grid = NumerovGrid { spec, consts: *consts, x_start, h: (x_end - x_start) / intervals as f64, intervals };
        let e = grid.eigenvalue(n, bracket.0, bracket.1, tol_e)?;
        if let Some(prev) = previous {
            let change = (e - prev).abs();
            if change < NUMEROV_DOUBLING_TOL || intervals >= NUMEROV_MAX_INTERVALS {
                let (psi, node_idx) = grid.solution(e);
                let nodes = node_idx
                    .into_iter()
                    .map(|i| {
                        let (x0, x1) = (grid.x(i), grid.x(i + 1));
                        x0 - psi[i] * (x1 - x0) / (psi[i + 1] - psi[i])
                    })
                    .collect();
                let mut sol =
                    NumerovSolution { energy: e, x_start, step: grid.h, psi, nodes, grid_doubling_change: change };
                // Cubic refinement of the linear node estimates.
                let refined: Vec<f64> = sol
                    .nodes
                    .iter()
                    .map(|&z| {
                        let (mut a, mut b) = (z - grid.h, z + grid.h);
                        let fa = sol.psi_at(a);
                        for _ in 0..100 {
                            let mid = 0.5 * (a + b);
                            if sol.psi_at(mid) * fa > 0.0 {
                                a = mid;
                            } else {
                                b = mid;
                            }
                        }
                        0.5 * (a + b)
                    })
                    .collect();
                sol.nodes = refined;
                return Ok(sol);
            }
        }
        previous = Some(e);
        let margin = 1e-3 * (e_up - e_n);
        bracket = ((e - margin).max(v_min), e + margin);
        intervals *= 2;
    }
}
