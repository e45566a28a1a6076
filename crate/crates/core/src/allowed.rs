//! Classically allowed region.
//!
//! Writing `W = X + iY`, the imaginary part integrates to
//! `Y = ħ log √X' + const`, and `X` obeys the third-order equation
//!
//! ```text
//! (4X'⁴ − 3ħ²X''² + 2ħ²X'X''') / (4X'²) = 2m(E − V)
//! ```
//!
//! whose solutions give the exact wavefunction
//! `ψ_II = A_II X'^{-1/2} sin(X/ħ + π/4)` between the turning points.
//! `X(x1) = 0` and `X'(x1) = b > 0` is the free parameter; `A_II` and
//! `X''(x1)` come from matching ψ and ψ' to the left forbidden branch.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::ode::{OdeOptions, OdeProblem, Trajectory};
use crate::potential::{PhysicalConstants, PotentialSpec, TurningPoints};
use crate::roots;

/// Constant phase added to `X/ħ` inside the sine.
pub const PHASE_OFFSET: f64 = FRAC_PI_4;

fn vanishing_threshold(energy: f64, consts: &PhysicalConstants) -> f64 {
    1e-10 * libm::sqrt(2.0 * consts.mass * energy.abs().max(1.0))
}

/// `(x, [X, X', X'']) ↦ [X', X'', X''']`.
pub fn x_field<'a>(
    energy: f64,
    spec: &'a PotentialSpec,
    consts: PhysicalConstants,
) -> impl Fn(f64, &[f64], &mut [f64]) -> Result<()> + 'a {
    let threshold = vanishing_threshold(energy, &consts);
    let h2 = consts.hbar * consts.hbar;
    move |x, s, ds| {
        let (d1, d2) = (s[1], s[2]);
        if !(d1.abs() >= threshold) {
            return Err(Error::PhaseDerivativeVanished { x });
        }
        let p2 = d1 * d1;
        let drive = 8.0 * consts.mass * (energy - spec.evaluate(x)) * p2;
        ds[0] = d1;
        ds[1] = d2;
        ds[2] = (drive - 4.0 * p2 * p2 + 3.0 * h2 * d2 * d2) / (2.0 * h2 * d1);
        Ok(())
    }
}

/// `ψ` and `ψ'/ψ` of the left forbidden branch at `x1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeftBoundary {
    pub psi: f64,
    pub log_derivative: f64,
}

/// Allowed-region initial data that reproduces a given `ψ(x1)` and
/// `ψ'(x1)/ψ(x1)` for `X(x1) = 0`, `X'(x1) = b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeftMatch {
    pub b: f64,
    /// `A_II`
    pub amplitude: f64,
    /// `X''(x1)`
    pub second_derivative: f64,
}

/// At `x1`, `sin = cos = 1/√2`, so
/// `ψ = A_II/√(2b)` and `ψ'/ψ = b/ħ − X''/(2b)`.
pub fn match_at_left(b: f64, psi_value: f64, log_deriv: f64, consts: &PhysicalConstants) -> Result<LeftMatch> {
    if !(b > 0.0) {
        return Err(Error::NonpositiveB { b });
    }
    if psi_value == 0.0 || !psi_value.is_finite() {
        return Err(Error::InvalidArgument("left boundary value of psi must be finite and nonzero"));
    }
    Ok(LeftMatch {
        b,
        amplitude: psi_value * libm::sqrt(2.0 * b),
        second_derivative: 2.0 * b * (b / consts.hbar - log_deriv),
    })
}

/// Classical-scale phase derivative `√(2m(E − V(x_mid)))` used before `b*`
/// is known.
pub fn default_b(energy: f64, spec: &PotentialSpec, consts: &PhysicalConstants, tp: &TurningPoints) -> f64 {
    libm::sqrt(consts.kappa_squared(energy, spec.evaluate(tp.midpoint())).max(0.0))
}

/// `X, X', X''` on `[x1, x2]` for one `(E, b)`.
#[derive(Debug, Clone)]
pub struct AllowedSolution {
    energy: f64,
    b: f64,
    amplitude: f64,
    hbar: f64,
    tp: TurningPoints,
    trajectory: Trajectory,
}

impl AllowedSolution {
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `A_II`
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Rescales `A_II` (used by normalization).
    pub(crate) fn scale_amplitude(&mut self, factor: f64) {
        self.amplitude *= factor;
    }

    pub fn turning_points(&self) -> TurningPoints {
        self.tp
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.trajectory
    }

    /// `[X, X', X'']` at `x`.
    pub fn state(&self, x: f64) -> [f64; 3] {
        let mut s = [0.0; 3];
        self.trajectory.eval_into(x, &mut s);
        s
    }

    pub fn phase(&self, x: f64) -> f64 {
        self.trajectory.component(x, 0)
    }

    pub fn phase_derivative(&self, x: f64) -> f64 {
        self.trajectory.component(x, 1)
    }

    pub fn phase_second_derivative(&self, x: f64) -> f64 {
        self.trajectory.component(x, 2)
    }

    /// `A_II sin(X/ħ + π/4)`
    pub fn sine_factor(&self, x: f64) -> f64 {
        self.amplitude * libm::sin(self.phase(x) / self.hbar + PHASE_OFFSET)
    }

    /// `1/√X'`
    pub fn envelope(&self, x: f64) -> f64 {
        1.0 / libm::sqrt(self.phase_derivative(x))
    }

    pub fn psi(&self, x: f64) -> f64 {
        let [p, d1, _] = self.state(x);
        self.amplitude / libm::sqrt(d1) * libm::sin(p / self.hbar + PHASE_OFFSET)
    }

    pub fn psi_derivative(&self, x: f64) -> f64 {
        let [p, d1, d2] = self.state(x);
        let arg = p / self.hbar + PHASE_OFFSET;
        let root = libm::sqrt(d1);
        self.amplitude * (-0.5 * d2 / (d1 * root) * libm::sin(arg) + root / self.hbar * libm::cos(arg))
    }

    /// `X(x2) − X(x1)`.
    pub fn delta_x(&self) -> f64 {
        self.trajectory.final_state()[0] - self.trajectory.state_at_node(0)[0]
    }

    /// `Y(x) = ħ log(√X'/A_II)`, so that `e^{−Y/ħ} = A_II/√X'`.
    pub fn imaginary_part(&self, x: f64) -> f64 {
        self.hbar * libm::log(libm::sqrt(self.phase_derivative(x)) / self.amplitude.abs())
    }

    /// Solutions of `X(x) = (k − ¼)πħ`, `k = 1, 2, …` inside `(x1, x2)`;
    /// these are exactly the zeros of ψ_II.
    pub fn node_positions(&self) -> Vec<f64> {
        let total = self.delta_x();
        let step = PI * self.hbar;
        let mut out = Vec::new();
        let mut k = 1;
        loop {
            let level = (k as f64 - 0.25) * step;
            if level >= total {
                break;
            }
            out.push(self.solve_phase(level));
            k += 1;
        }
        out
    }

    /// Number of sign changes of ψ_II in `(x1, x2)`.
    pub fn node_count(&self) -> usize {
        let q = self.delta_x() / (PI * self.hbar) + 0.25;
        if q <= 1.0 {
            0
        } else {
            let f = libm::floor(q);
            if f == q {
                f as usize - 1
            } else {
                f as usize
            }
        }
    }

    // X is strictly increasing; bisection over the accepted steps then inside one.
    fn solve_phase(&self, level: f64) -> f64 {
        let xs = self.trajectory.nodes();
        let i = (0..xs.len()).find(|&i| self.trajectory.state_at_node(i)[0] >= level).unwrap_or(xs.len() - 1);
        let (mut lo, mut hi) = (xs[i.saturating_sub(1)], xs[i]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if self.phase(mid) < level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Largest scaled defect of the third-order equation over the nodes:
    /// `|4X'⁴ − 3ħ²X''² + 2ħ²X'X''' − 8m(E − V)X'²| / (4X'²)` relative to
    /// `max(1, 2m|E − V|)`, with `X'''` from the stored field values.
    pub fn max_defect(&self, spec: &PotentialSpec, consts: &PhysicalConstants) -> f64 {
        let h2 = consts.hbar * consts.hbar;
        let mut worst = 0.0f64;
        for (i, &x) in self.trajectory.nodes().iter().enumerate() {
            let s = self.trajectory.state_at_node(i);
            let d3 = self.trajectory.derivative_at_node(i)[2];
            let (d1, d2) = (s[1], s[2]);
            let drive = 2.0 * consts.mass * (self.energy - spec.evaluate(x));
            let p2 = d1 * d1;
            let lhs = 4.0 * p2 * p2 - 3.0 * h2 * d2 * d2 + 2.0 * h2 * d1 * d3;
            let defect = (lhs - 4.0 * drive * p2).abs() / (4.0 * p2);
            worst = worst.max(defect / drive.abs().max(1.0));
        }
        worst
    }

    /// Smallest `X'` over the nodes.
    pub fn min_phase_derivative(&self) -> f64 {
        (0..self.trajectory.len()).map(|i| self.trajectory.state_at_node(i)[1]).fold(f64::INFINITY, f64::min)
    }
}

/// Integrates the phase equation from `x1` to `x2` starting at
/// `(0, b, X''(x1))`.
pub fn integrate_allowed(
    energy: f64,
    b: f64,
    spec: &PotentialSpec,
    consts: &PhysicalConstants,
    tp: &TurningPoints,
    left: &LeftMatch,
    ode: &OdeOptions,
) -> Result<AllowedSolution> {
    if !(b > 0.0) {
        return Err(Error::NonpositiveB { b });
    }
    let field = x_field(energy, spec, *consts);
    let problem = OdeProblem::new(field, tp.x1, tp.x2, vec![0.0, b, left.second_derivative], *ode);
    let trajectory = problem.integrate()?;
    let sol = AllowedSolution { energy, b, amplitude: left.amplitude, hbar: consts.hbar, tp: *tp, trajectory };
    // The field refuses X' below threshold, but a step could still jump across zero.
    if !(sol.min_phase_derivative() > 0.0) {
        let i = (0..sol.trajectory.len()).find(|&i| sol.trajectory.state_at_node(i)[1] <= 0.0).unwrap_or(0);
        return Err(Error::PhaseDerivativeVanished { x: sol.trajectory.nodes()[i] });
    }
    Ok(sol)
}

/// `X(x2) − X(x1)`.
pub fn delta_x(sol: &AllowedSolution) -> f64 {
    sol.delta_x()
}

/// Result of solving `ΔX(b) = (n + ½)πħ`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BStarResult {
    pub b_star: f64,
    pub delta_x: f64,
    /// Sign-change bracket in `b` that the search started from.
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// `ΔX` as a function of `b` at fixed `E`.
pub fn delta_x_at(
    energy: f64,
    b: f64,
    spec: &PotentialSpec,
    consts: &PhysicalConstants,
    tp: &TurningPoints,
    left: &LeftBoundary,
    ode: &OdeOptions,
) -> Result<f64> {
    let m = match_at_left(b, left.psi, left.log_derivative, consts)?;
    Ok(integrate_allowed(energy, b, spec, consts, tp, &m, ode)?.delta_x())
}

/// Finds `b*` with `ΔX(b*) = (n + ½)πħ`, bracketing by geometric expansion
/// from [`default_b`].
#[allow(clippy::too_many_arguments)]
pub fn find_b_star(
    energy: f64,
    n: usize,
    spec: &PotentialSpec,
    consts: &PhysicalConstants,
    tp: &TurningPoints,
    left: &LeftBoundary,
    ode: &OdeOptions,
) -> Result<BStarResult> {
    let target = (n as f64 + 0.5) * PI * consts.hbar;
    let f = |b: f64| delta_x_at(energy, b, spec, consts, tp, left, ode).map(|d| d - target);
    let b0 = default_b(energy, spec, consts, tp);
    let f0 = f(b0)?;
    let (mut lo, mut hi, mut flo, mut fhi) = (b0, b0, f0, f0);
    let mut expansions = 0;
    while flo > 0.0 {
        hi = lo;
        fhi = flo;
        lo *= 0.5;
        flo = f(lo)?;
        expansions += 1;
        if expansions > 60 {
            return Err(Error::BracketNotFound { what: "b* (lower side)" });
        }
    }
    while fhi < 0.0 {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        fhi = f(hi)?;
        expansions += 1;
        if expansions > 60 {
            return Err(Error::BracketNotFound { what: "b* (upper side)" });
        }
    }
    let root = roots::brent(f, lo, hi, flo, fhi, 1e-15 * hi, 1e-11 * PI * consts.hbar, 200)?;
    Ok(BStarResult {
        b_star: root.x,
        delta_x: root.fx + target,
        bracket: (lo, hi),
        iterations: expansions + root.iterations,
    })
}

/// `x ↦ Y(x)` in the allowed region, `Y = ħ log(√X'/A_II)`.
pub fn imaginary_part_car<'a>(sol: &'a AllowedSolution, _consts: &PhysicalConstants) -> impl Fn(f64) -> f64 + 'a {
    move |x| sol.imaginary_part(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_wave_phase_is_exact() {
        let spec = PotentialSpec::polynomial(vec![0.0, 0.0, 1e-300]).unwrap();
        let consts = PhysicalConstants::default();
        let e = 2.0;
        let field = x_field(e, &spec, consts);
        let p = libm::sqrt(2.0 * e);
        let mut ds = [0.0; 3];
        field(0.3, &[0.0, p, 0.0], &mut ds).unwrap();
        assert!(ds[2].abs() < 1e-14);
    }

    #[test]
    fn vanishing_phase_derivative_is_an_error() {
        let spec = PotentialSpec::harmonic(1.0).unwrap();
        let field = x_field(0.5, &spec, PhysicalConstants::default());
        let mut ds = [0.0; 3];
        assert!(matches!(
            field(0.25, &[0.0, 1e-12, 0.0], &mut ds),
            Err(Error::PhaseDerivativeVanished { x }) if x == 0.25
        ));
    }

    #[test]
    fn left_match_closed_forms() {
        let c = PhysicalConstants::default();
        let m = match_at_left(1.0, 1.0, 0.0, &c).unwrap();
        assert!((m.amplitude - libm::sqrt(2.0)).abs() < 1e-15);
        assert!((m.second_derivative - 2.0).abs() < 1e-15);
        let m = match_at_left(1.7, 0.3, 1.7, &c).unwrap();
        assert_eq!(m.second_derivative, 0.0);
        assert!(matches!(match_at_left(0.0, 1.0, 0.0, &c), Err(Error::NonpositiveB { .. })));
        assert!(matches!(match_at_left(-1.0, 1.0, 0.0, &c), Err(Error::NonpositiveB { .. })));
    }

    #[test]
    fn left_match_reproduces_psi_and_slope() {
        // Re-derive ψ, ψ' at x1 from the representation and compare.
        let c = PhysicalConstants::new(0.7, 1.3).unwrap();
        let (b, psi, ld) = (0.9, 0.42, -0.35);
        let m = match_at_left(b, psi, ld, &c).unwrap();
        let arg = PHASE_OFFSET;
        let value = m.amplitude / libm::sqrt(b) * libm::sin(arg);
        let slope = m.amplitude
            * (-0.5 * m.second_derivative / (b * libm::sqrt(b)) * libm::sin(arg)
                + libm::sqrt(b) / c.hbar * libm::cos(arg));
        assert!((value - psi).abs() < 1e-15);
        assert!((slope / value - ld).abs() < 1e-14);
    }

    #[test]
    fn node_count_thresholds() {
        let spec = PotentialSpec::harmonic(1.0).unwrap();
        let consts = PhysicalConstants::default();
        let tp = TurningPoints { x1: -1.0, x2: 1.0 };
        let m = match_at_left(1.0, 1.0, 1.0, &consts).unwrap();
        let sol = integrate_allowed(0.5, 1.0, &spec, &consts, &tp, &m, &OdeOptions::default()).unwrap();
        assert!(sol.delta_x() > 0.0);
        assert_eq!(sol.node_count(), sol.node_positions().len());
    }
}
