//! Confining one-dimensional potentials, turning points and far-field
//! cutoffs.

use alloc::vec::Vec;

use crate::error::{Error, Result, Side};
use crate::quad;

/// Planck constant and particle mass in the unit system of the potential.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants { hbar: 1.0, mass: 1.0 }
    }
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) || !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidArgument("hbar and mass must be positive and finite"));
        }
        Ok(PhysicalConstants { hbar, mass })
    }

    /// `2m(V - E)`, the squared local decay rate times ħ².
    #[inline]
    pub fn kappa_squared(&self, potential: f64, energy: f64) -> f64 {
        2.0 * self.mass * (potential - energy)
    }
}

/// Closed-form potential `V(x)`.
///
/// Every variant is confining (`V → +∞` as `|x| → ∞`); the constructors and
/// deserialization reject parameters that are not.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "lowercase", try_from = "RawPotential"))]
pub enum PotentialSpec {
    /// `½ k x² + λ x⁴`
    Quartic { k: f64, lambda: f64 },
    /// `½ k x²`
    Harmonic { k: f64 },
    /// `Σ cᵢ xⁱ`, coefficients in ascending order of power.
    Polynomial { coefficients: Vec<f64> },
}

#[cfg(feature = "serde")]
#[derive(serde::Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawPotential {
    Quartic { k: f64, lambda: f64 },
    Harmonic { k: f64 },
    Polynomial { coefficients: Vec<f64> },
}

#[cfg(feature = "serde")]
impl TryFrom<RawPotential> for PotentialSpec {
    type Error = Error;

    fn try_from(raw: RawPotential) -> Result<Self> {
        match raw {
            RawPotential::Quartic { k, lambda } => PotentialSpec::quartic(k, lambda),
            RawPotential::Harmonic { k } => PotentialSpec::harmonic(k),
            RawPotential::Polynomial { coefficients } => PotentialSpec::polynomial(coefficients),
        }
    }
}

impl PotentialSpec {
    pub fn quartic(k: f64, lambda: f64) -> Result<Self> {
        if !k.is_finite() || !lambda.is_finite() {
            return Err(Error::InvalidPotential("quartic parameters must be finite"));
        }
        if lambda < 0.0 {
            return Err(Error::InvalidPotential("quartic lambda must be nonnegative"));
        }
        if lambda == 0.0 && k <= 0.0 {
            return Err(Error::InvalidPotential("quartic with lambda = 0 needs k > 0"));
        }
        Ok(PotentialSpec::Quartic { k, lambda })
    }

    pub fn harmonic(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidPotential("harmonic k must be positive"));
        }
        Ok(PotentialSpec::Harmonic { k })
    }

    /// Trailing zero coefficients are dropped before validation.
    pub fn polynomial(mut coefficients: Vec<f64>) -> Result<Self> {
        while coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPotential("polynomial coefficients must be finite"));
        }
        let degree = coefficients.len().saturating_sub(1);
        if degree < 2 || !degree.is_multiple_of(2) {
            return Err(Error::InvalidPotential("polynomial degree must be even and at least 2"));
        }
        if coefficients[degree] <= 0.0 {
            return Err(Error::InvalidPotential("polynomial leading coefficient must be positive"));
        }
        Ok(PotentialSpec::Polynomial { coefficients })
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        match self {
            PotentialSpec::Quartic { k, lambda } => {
                let x2 = x * x;
                0.5 * k * x2 + lambda * x2 * x2
            }
            PotentialSpec::Harmonic { k } => 0.5 * k * x * x,
            PotentialSpec::Polynomial { coefficients } => coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            PotentialSpec::Quartic { k, lambda } => k * x + 4.0 * lambda * x * x * x,
            PotentialSpec::Harmonic { k } => k * x,
            PotentialSpec::Polynomial { coefficients } => coefficients
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (i, c)| acc * x + i as f64 * c),
        }
    }

    /// Polynomial coefficients of `V` in ascending order of power.
    pub fn coefficients(&self) -> Vec<f64> {
        match self {
            PotentialSpec::Quartic { k, lambda } => alloc::vec![0.0, 0.0, 0.5 * k, 0.0, *lambda],
            PotentialSpec::Harmonic { k } => alloc::vec![0.0, 0.0, 0.5 * k],
            PotentialSpec::Polynomial { coefficients } => coefficients.clone(),
        }
    }

    // Cauchy bound on the real roots of V(x) − E.
    fn root_bound(&self, energy: f64) -> f64 {
        let mut c = self.coefficients();
        while c.last() == Some(&0.0) {
            c.pop();
        }
        c[0] -= energy;
        let n = c.len() - 1;
        1.0 + (0..n).map(|i| (c[i] / c[n]).abs()).fold(0.0f64, f64::max)
    }

    /// Whether `V(-x) = V(x)` holds structurally.
    pub fn is_even(&self) -> bool {
        match self {
            PotentialSpec::Quartic { .. } | PotentialSpec::Harmonic { .. } => true,
            PotentialSpec::Polynomial { coefficients } => {
                coefficients.iter().skip(1).step_by(2).all(|&c| c == 0.0)
            }
        }
    }

    /// Location and value of the global minimum.
    pub fn minimum(&self) -> (f64, f64) {
        match self {
            PotentialSpec::Harmonic { .. } => (0.0, 0.0),
            PotentialSpec::Quartic { k, lambda } => {
                if *k >= 0.0 {
                    (0.0, 0.0)
                } else {
                    let x = libm::sqrt(-k / (4.0 * lambda));
                    (x, self.evaluate(x))
                }
            }
            PotentialSpec::Polynomial { coefficients } => polynomial_minimum(self, coefficients),
        }
    }
}

// Critical points lie within the Cauchy bound of V'; scan that interval and
// polish the best sample by golden-section search.
fn polynomial_minimum(spec: &PotentialSpec, c: &[f64]) -> (f64, f64) {
    let n = c.len() - 1;
    let lead = n as f64 * c[n];
    let bound = 1.0
        + (1..n)
            .map(|i| (i as f64 * c[i] / lead).abs())
            .fold(0.0f64, f64::max);
    const SAMPLES: usize = 4096;
    let step = 2.0 * bound / SAMPLES as f64;
    let mut best = (0usize, f64::INFINITY);
    for i in 0..=SAMPLES {
        let v = spec.evaluate(-bound + step * i as f64);
        if v < best.1 {
            best = (i, v);
        }
    }
    let mut a = -bound + step * (best.0 as f64 - 1.0);
    let mut b = -bound + step * (best.0 as f64 + 1.0);
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (spec.evaluate(x1), spec.evaluate(x2));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = spec.evaluate(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = spec.evaluate(x2);
        }
    }
    let x = 0.5 * (a + b);
    (x, spec.evaluate(x))
}

/// The two roots of `V(x) = E` bounding the classically allowed interval.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TurningPoints {
    pub x1: f64,
    pub x2: f64,
}

impl TurningPoints {
    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.x1 + self.x2)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x1 && x <= self.x2
    }
}

fn root_tolerance(energy: f64) -> f64 {
    1e-12 * energy.abs().max(1.0)
}

// Bisect V(x) - E between an inside point (V < E) and an outside point.
fn refine_crossing(spec: &PotentialSpec, energy: f64, mut inside: f64, mut outside: f64) -> f64 {
    let tol = root_tolerance(energy);
    for _ in 0..400 {
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        let g = spec.evaluate(mid) - energy;
        if g.abs() <= tol {
            return mid;
        }
        if g < 0.0 {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    let gi = (spec.evaluate(inside) - energy).abs();
    let go = (spec.evaluate(outside) - energy).abs();
    if gi <= go {
        inside
    } else {
        outside
    }
}

fn scan_outward(spec: &PotentialSpec, energy: f64, origin: f64, dir: f64) -> Result<f64> {
    let mut step = 1e-8 * origin.abs().max(1.0);
    let mut inner = origin;
    for _ in 0..200 {
        let x = origin + dir * step;
        if spec.evaluate(x) - energy > 0.0 {
            return Ok(refine_crossing(spec, energy, inner, x));
        }
        inner = x;
        step *= 1.5;
    }
    Err(Error::InvalidPotential("potential does not exceed the energy within the scan range"))
}

/// Finds `x1 < x2` with `V(x1) = V(x2) = E` around the potential minimum.
pub fn find_turning_points(spec: &PotentialSpec, energy: f64) -> Result<TurningPoints> {
    let (x_min, v_min) = spec.minimum();
    if !(energy > v_min) {
        return Err(Error::EnergyBelowMinimum { energy, minimum: v_min });
    }
    let x2 = scan_outward(spec, energy, x_min, 1.0)?;
    let x1 = scan_outward(spec, energy, x_min, -1.0)?;

    // A second well or an internal barrier shows up as extra sign changes.
    // Every root of V − E lies within the Cauchy bound of that polynomial.
    let w = x2 - x1;
    let reach = spec.root_bound(energy);
    let (lo, hi) = ((x1 - w).min(-reach), (x2 + w).max(reach));
    const SAMPLES: usize = 16384;
    let step = (hi - lo) / SAMPLES as f64;
    let mut sign_changes = 0;
    let mut prev = spec.evaluate(lo) - energy > 0.0;
    for i in 1..=SAMPLES {
        let x = lo + step * i as f64;
        let cur = spec.evaluate(x) - energy > 0.0;
        if cur != prev {
            sign_changes += 1;
        }
        prev = cur;
    }
    if sign_changes > 2 {
        return Err(Error::MultipleWells { sign_changes });
    }
    Ok(TurningPoints { x1, x2 })
}

/// `∫ √(2m(V − E)) dx / ħ` from the turning point `tp` to `x` (on the
/// forbidden side). The square-root zero at `tp` is removed by `x = tp ± s²`.
pub(crate) fn decay_integral(spec: &PotentialSpec, consts: &PhysicalConstants, energy: f64, tp: f64, x: f64) -> f64 {
    let dir = if x >= tp { 1.0 } else { -1.0 };
    let s_end = libm::sqrt((x - tp).abs());
    let f = |s: f64| {
        let xx = tp + dir * s * s;
        let k2 = consts.kappa_squared(spec.evaluate(xx), energy).max(0.0);
        libm::sqrt(k2) * 2.0 * s
    };
    quad::integrate(f, 0.0, s_end, 1e-13, 1e-12).value / consts.hbar
}

/// Default accumulated decay `∫κ dx/ħ` between a turning point and its cutoff.
pub const DEFAULT_DECAY_BUDGET: f64 = 30.0;

/// Cutoffs `(x_min, x_max)` beyond the turning points where the leading-order
/// WKB decay of ψ has accumulated at least `decay_budget`.
///
/// The scan gives up at `max_distance` from each turning point, which
/// defaults to `1000·max(1, x2 − x1)` in [`far_field_cutoffs`].
pub fn far_field_cutoffs_within(
    spec: &PotentialSpec,
    consts: &PhysicalConstants,
    energy: f64,
    tp: &TurningPoints,
    decay_budget: f64,
    max_distance: f64,
) -> Result<(f64, f64)> {
    if !(decay_budget > 0.0) {
        return Err(Error::InvalidArgument("decay budget must be positive"));
    }
    let left = cutoff_one_side(spec, consts, energy, tp.x1, -1.0, decay_budget, max_distance, tp.width())
        .ok_or(Error::CutoffSearchFailed { side: Side::Left })?;
    let right = cutoff_one_side(spec, consts, energy, tp.x2, 1.0, decay_budget, max_distance, tp.width())
        .ok_or(Error::CutoffSearchFailed { side: Side::Right })?;
    Ok((left, right))
}

pub fn far_field_cutoffs(
    spec: &PotentialSpec,
    consts: &PhysicalConstants,
    energy: f64,
    tp: &TurningPoints,
    decay_budget: f64,
) -> Result<(f64, f64)> {
    let max_distance = 1e3 * tp.width().max(1.0);
    far_field_cutoffs_within(spec, consts, energy, tp, decay_budget, max_distance)
}

#[allow(clippy::too_many_arguments)]
fn cutoff_one_side(
    spec: &PotentialSpec,
    consts: &PhysicalConstants,
    energy: f64,
    tp: f64,
    dir: f64,
    budget: f64,
    max_distance: f64,
    width: f64,
) -> Option<f64> {
    let seg_integral = |a: f64, b: f64| {
        let f = |x: f64| libm::sqrt(consts.kappa_squared(spec.evaluate(x), energy).max(0.0));
        quad::integrate(f, a, b, 1e-13, 1e-12).value.abs() / consts.hbar
    };
    // First segment carries the square-root endpoint.
    let mut len = 0.05 * width.max(1e-6);
    let mut start = tp;
    let mut end = tp + dir * len;
    let mut acc_before = 0.0;
    let mut acc = decay_integral(spec, consts, energy, tp, end);
    let mut first = true;
    while acc < budget {
        if (end - tp).abs() > max_distance {
            return None;
        }
        start = end;
        acc_before = acc;
        len *= 2.0;
        end = start + dir * len;
        acc += seg_integral(start, end);
        first = false;
    }
    // Locate the crossing inside [start, end], returning the outer bisection
    // end so the accumulated decay is never short of the budget.
    let accumulated = |x: f64| {
        if first {
            decay_integral(spec, consts, energy, tp, x)
        } else {
            acc_before + seg_integral(start, x)
        }
    };
    let (mut inner, mut outer) = (start, end);
    for _ in 0..100 {
        let mid = 0.5 * (inner + outer);
        if mid == inner || mid == outer || (outer - inner).abs() <= 1e-12 * (1.0 + tp.abs()) {
            break;
        }
        if accumulated(mid) >= budget {
            outer = mid;
        } else {
            inner = mid;
        }
    }
    Some(outer)
}
