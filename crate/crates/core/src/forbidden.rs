//! Classically forbidden regions.
//!
//! With `W = iY` the quantum Hamilton–Jacobi equation reduces to a Riccati
//! equation for `Q = Y'`:
//!
//! ```text
//! ħ Q' = Q² + 2m (E − V(x)),        ψ = A e^{−Y/ħ},   ψ'/ψ = −Q/ħ
//! ```
//!
//! Region I (left of `x1`) is integrated forward from its cutoff and region
//! III (right of `x2`) backward from its cutoff; in both directions the
//! decaying branch `Q = ∓√(2m(V − E))` is the attracting one, so the crude
//! initial value is forgotten long before the turning point is reached.

use alloc::vec;

use crate::error::{Error, Result};
use crate::ode::{OdeOptions, OdeProblem, Trajectory};
use crate::potential::{PhysicalConstants, PotentialSpec, TurningPoints};

/// The two classically forbidden regions of a single well.
#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForbiddenRegion {
    /// `x_min ≤ x ≤ x1`
    I,
    /// `x2 ≤ x ≤ x_max`
    III,
}

/// `(x, Q) ↦ Q' = (Q² + 2m(E − V(x)))/ħ`.
pub fn riccati_field<'a>(
    energy: f64,
    spec: &'a PotentialSpec,
    consts: PhysicalConstants,
) -> impl Fn(f64, f64) -> f64 + 'a {
    move |x, q| (q * q + 2.0 * consts.mass * (energy - spec.evaluate(x))) / consts.hbar
}

/// `Q` and `Y` across one forbidden region, with `Y(turning point) = 0`.
#[derive(Debug, Clone)]
pub struct ForbiddenSolution {
    region: ForbiddenRegion,
    energy: f64,
    hbar: f64,
    turning_point: f64,
    cutoff: f64,
    q_tp: f64,
    y_shift: f64,
    // state: [Q, Y + y_shift]
    trajectory: Trajectory,
}

impl ForbiddenSolution {
    pub fn region(&self) -> ForbiddenRegion {
        self.region
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn turning_point(&self) -> f64 {
        self.turning_point
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// `Q` at the turning point.
    pub fn q_tp(&self) -> f64 {
        self.q_tp
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.trajectory
    }

    /// `(lo, hi)` of the region actually covered.
    pub fn span(&self) -> (f64, f64) {
        self.trajectory.span()
    }

    pub fn q(&self, x: f64) -> f64 {
        self.trajectory.component(x, 0)
    }

    pub fn y(&self, x: f64) -> f64 {
        self.trajectory.component(x, 1) - self.y_shift
    }

    /// Unit-amplitude branch `e^{−Y/ħ}`.
    pub fn psi_unit(&self, x: f64) -> f64 {
        libm::exp(-self.y(x) / self.hbar)
    }

    /// Derivative of [`psi_unit`](Self::psi_unit).
    pub fn psi_unit_derivative(&self, x: f64) -> f64 {
        -self.q(x) / self.hbar * self.psi_unit(x)
    }

    /// `ψ'/ψ` at the turning point, `−Q_tp/ħ`.
    pub fn log_derivative_at_tp(&self) -> f64 {
        -self.q_tp / self.hbar
    }

    /// Largest scaled residual `|ħQ' − Q² − 2m(E − V)| / max(1, Q²)` over the
    /// integration nodes, with `Q'` taken from the dense-output derivative.
    pub fn max_residual(&self, spec: &PotentialSpec, consts: &PhysicalConstants) -> f64 {
        let mut d = [0.0; 2];
        let mut worst = 0.0f64;
        for (i, &x) in self.trajectory.nodes().iter().enumerate() {
            let q = self.trajectory.state_at_node(i)[0];
            self.trajectory.derivative_into(x, &mut d);
            let r = (consts.hbar * d[0] - q * q - 2.0 * consts.mass * (self.energy - spec.evaluate(x))).abs();
            worst = worst.max(r / (q * q).max(1.0));
        }
        worst
    }
}

/// `ψ'/ψ` at the turning point of a forbidden solution.
pub fn log_derivative_at_tp(sol: &ForbiddenSolution, consts: &PhysicalConstants) -> f64 {
    -sol.q_tp / consts.hbar
}

/// Integrates one forbidden region between its cutoff and turning point.
pub fn solve_region(
    region: ForbiddenRegion,
    energy: f64,
    spec: &PotentialSpec,
    consts: &PhysicalConstants,
    cutoffs: (f64, f64),
    tp: &TurningPoints,
    ode: &OdeOptions,
) -> Result<ForbiddenSolution> {
    let (cutoff, turning_point, sign) = match region {
        ForbiddenRegion::I => (cutoffs.0, tp.x1, -1.0),
        ForbiddenRegion::III => (cutoffs.1, tp.x2, 1.0),
    };
    let v_cut = spec.evaluate(cutoff);
    if !(v_cut > energy) {
        return Err(Error::InvalidArgument("energy must lie below the potential at the cutoff"));
    }
    let q0 = sign * libm::sqrt(consts.kappa_squared(v_cut, energy));
    let field = riccati_field(energy, spec, *consts);
    let problem = OdeProblem::new(
        |x: f64, s: &[f64], ds: &mut [f64]| {
            ds[0] = field(x, s[0]);
            ds[1] = s[0];
            Ok(())
        },
        cutoff,
        turning_point,
        vec![q0, 0.0],
        *ode,
    );
    let trajectory = problem.integrate()?;
    let end = trajectory.final_state();
    let (q_tp, y_shift) = (end[0], end[1]);

    let vicinity = 1e-3 * (cutoff - turning_point).abs();
    for (i, &x) in trajectory.nodes().iter().enumerate() {
        let q = trajectory.state_at_node(i)[0];
        if (x - turning_point).abs() > vicinity && !(sign * q > 0.0) {
            return Err(Error::WrongBranch { x });
        }
    }

    Ok(ForbiddenSolution {
        region,
        energy,
        hbar: consts.hbar,
        turning_point,
        cutoff,
        q_tp,
        y_shift,
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{far_field_cutoffs, find_turning_points};

    fn harmonic_ground() -> (PotentialSpec, PhysicalConstants, TurningPoints, (f64, f64)) {
        let spec = PotentialSpec::harmonic(1.0).unwrap();
        let consts = PhysicalConstants::default();
        let tp = find_turning_points(&spec, 0.5).unwrap();
        let cut = far_field_cutoffs(&spec, &consts, 0.5, &tp, 30.0).unwrap();
        (spec, consts, tp, cut)
    }

    #[test]
    fn field_examples() {
        let spec = PotentialSpec::harmonic(1.0).unwrap();
        let consts = PhysicalConstants::default();
        let f = riccati_field(0.5, &spec, consts);
        assert_eq!(f(1.0, 0.0), 0.0);
        assert!((f(2.0, 0.0) + 3.0).abs() < 1e-15);
        let k = libm::sqrt(2.0 * (spec.evaluate(2.0) - 0.5));
        assert!(f(2.0, k).abs() < 1e-14 && f(2.0, -k).abs() < 1e-14);
    }

    #[test]
    fn harmonic_ground_state_tail_is_exact() {
        let (spec, consts, tp, cut) = harmonic_ground();
        let ode = OdeOptions::default();
        let right = solve_region(ForbiddenRegion::III, 0.5, &spec, &consts, cut, &tp, &ode).unwrap();
        // ψ ∝ e^{−x²/2} ⇒ Q = x
        assert!((right.q(2.0) - 2.0).abs() < 1e-6);
        assert!((right.q_tp() - 1.0).abs() < 1e-6);
        assert!((log_derivative_at_tp(&right, &consts) + 1.0).abs() < 1e-6);
        // Y = (x² − 1)/2 relative to the turning point
        assert!((right.y(3.0) - 4.0).abs() < 1e-6);
        assert_eq!(right.y(tp.x2), 0.0);

        let left = solve_region(ForbiddenRegion::I, 0.5, &spec, &consts, cut, &tp, &ode).unwrap();
        assert!(left.log_derivative_at_tp() > 0.0);
        for &x in &[1.0, 1.5, 2.5, 4.0] {
            assert!((left.q(-x) + right.q(x)).abs() < 1e-8, "x = {x}");
        }
        assert!(left.max_residual(&spec, &consts) < 1e-8);
        assert!(right.max_residual(&spec, &consts) < 1e-8);
    }

    #[test]
    fn wrong_energy_order_is_rejected() {
        let (spec, consts, tp, _) = harmonic_ground();
        let r = solve_region(ForbiddenRegion::III, 0.5, &spec, &consts, (-1.0, 1.0), &tp, &OdeOptions::default());
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn perturbed_start_is_forgotten() {
        let spec = PotentialSpec::quartic(1.0, 1.0).unwrap();
        let consts = PhysicalConstants::default();
        let e = 5.179295;
        let tp = find_turning_points(&spec, e).unwrap();
        let cut = far_field_cutoffs(&spec, &consts, e, &tp, 30.0).unwrap();
        let ode = OdeOptions::default();
        let base = solve_region(ForbiddenRegion::III, e, &spec, &consts, cut, &tp, &ode).unwrap();
        let field = riccati_field(e, &spec, consts);
        let q0 = 1.01 * libm::sqrt(consts.kappa_squared(spec.evaluate(cut.1), e));
        let p = OdeProblem::new(
            |x: f64, s: &[f64], ds: &mut [f64]| {
                ds[0] = field(x, s[0]);
                Ok(())
            },
            cut.1,
            tp.x2,
            vec![q0],
            ode,
        );
        let perturbed = p.integrate().unwrap().final_state()[0];
        assert!(((perturbed - base.q_tp()) / base.q_tp()).abs() < 1e-6);
    }
}
