//! Explicit adaptive Dormand–Prince 5(4) integrator with the classic
//! fourth-order continuous extension.
//!
//! The vector field is a closure `field(x, y, dy) -> Result<()>`. A field may
//! refuse a state (for instance a singular denominator); the integrator
//! treats that like a failed step and retries with a smaller step, and only
//! surfaces the field's error once the step-size floor is hit.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

// Butcher tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th and 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense output.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rel_tol: 1e-10, abs_tol: 1e-12, max_steps: 200_000 }
    }
}

impl OdeOptions {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        OdeOptions { rel_tol, abs_tol, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |t: f64| t > 0.0 && t <= 1e-2;
        if !ok(self.rel_tol) || !ok(self.abs_tol) {
            return Err(Error::InvalidArgument("ODE tolerances must lie in (0, 1e-2]"));
        }
        Ok(())
    }

    /// Same options with both tolerances scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        OdeOptions { rel_tol: self.rel_tol * factor, abs_tol: self.abs_tol * factor, ..*self }
    }
}

/// An initial value problem `y' = field(x, y)`, `y(x_start) = initial_state`.
pub struct OdeProblem<F> {
    pub field: F,
    pub x_start: f64,
    pub x_end: f64,
    pub initial_state: Vec<f64>,
    pub options: OdeOptions,
}

impl<F> OdeProblem<F>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
{
    pub fn new(field: F, x_start: f64, x_end: f64, initial_state: Vec<f64>, options: OdeOptions) -> Self {
        OdeProblem { field, x_start, x_end, initial_state, options }
    }

    pub fn dimension(&self) -> usize {
        self.initial_state.len()
    }

    pub fn integrate(&self) -> Result<Trajectory> {
        integrate(self)
    }
}

/// Accepted nodes of an integration plus the per-step interpolation data.
///
/// Nodes are strictly monotone in `x`, increasing or decreasing depending on
/// the integration direction. Evaluation is direction-agnostic.
#[derive(Debug, Clone)]
pub struct Trajectory {
    dim: usize,
    xs: Vec<f64>,
    states: Vec<f64>,
    derivs: Vec<f64>,
    // Five coefficient vectors per step, each of length `dim`.
    dense: Vec<f64>,
    function_evaluations: usize,
    rejected_steps: usize,
}

impl Trajectory {
    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.xs
    }

    pub fn state_at_node(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    /// Field value stored at node `i`.
    pub fn derivative_at_node(&self, i: usize) -> &[f64] {
        &self.derivs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn x_start(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_end(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    pub fn final_state(&self) -> &[f64] {
        self.state_at_node(self.len() - 1)
    }

    pub fn function_evaluations(&self) -> usize {
        self.function_evaluations
    }

    pub fn rejected_steps(&self) -> usize {
        self.rejected_steps
    }

    pub fn accepted_steps(&self) -> usize {
        self.len() - 1
    }

    fn increasing(&self) -> bool {
        self.len() < 2 || self.xs[1] > self.xs[0]
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.span();
        x >= lo && x <= hi
    }

    /// `(min x, max x)` covered by the trajectory.
    pub fn span(&self) -> (f64, f64) {
        let (a, b) = (self.x_start(), self.x_end());
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    // Index of the step whose closed interval contains x (clamped at the ends).
    fn step_index(&self, x: f64) -> usize {
        let steps = self.len() - 1;
        let inc = self.increasing();
        let pos = if inc {
            self.xs.partition_point(|&xi| xi <= x)
        } else {
            self.xs.partition_point(|&xi| xi >= x)
        };
        pos.saturating_sub(1).min(steps.saturating_sub(1))
    }

    fn coefficients(&self, step: usize) -> &[f64] {
        &self.dense[step * 5 * self.dim..(step + 1) * 5 * self.dim]
    }

    /// Dense-output state at `x`. Outside the span the end step's
    /// polynomial is extrapolated, so callers should stay inside it.
    pub fn eval_into(&self, x: f64, out: &mut [f64]) {
        if self.len() == 1 {
            out.copy_from_slice(self.state_at_node(0));
            return;
        }
        let k = self.step_index(x);
        let h = self.xs[k + 1] - self.xs[k];
        let theta = (x - self.xs[k]) / h;
        let theta1 = 1.0 - theta;
        let r = self.coefficients(k);
        let d = self.dim;
        for i in 0..d {
            let (r1, r2, r3, r4, r5) = (r[i], r[d + i], r[2 * d + i], r[3 * d + i], r[4 * d + i]);
            out[i] = r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
        }
    }

    pub fn eval(&self, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(x, &mut out);
        out
    }

    /// One component of the dense-output state.
    pub fn component(&self, x: f64, c: usize) -> f64 {
        if self.len() == 1 {
            return self.state_at_node(0)[c];
        }
        let k = self.step_index(x);
        let h = self.xs[k + 1] - self.xs[k];
        let theta = (x - self.xs[k]) / h;
        let theta1 = 1.0 - theta;
        let r = self.coefficients(k);
        let d = self.dim;
        let (r1, r2, r3, r4, r5) = (r[c], r[d + c], r[2 * d + c], r[3 * d + c], r[4 * d + c]);
        r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)))
    }

    /// Derivative of the dense-output polynomial with respect to `x`.
    pub fn derivative_into(&self, x: f64, out: &mut [f64]) {
        if self.len() == 1 {
            out.copy_from_slice(self.derivative_at_node(0));
            return;
        }
        let k = self.step_index(x);
        let h = self.xs[k + 1] - self.xs[k];
        let theta = (x - self.xs[k]) / h;
        let theta1 = 1.0 - theta;
        let r = self.coefficients(k);
        let d = self.dim;
        for i in 0..d {
            let (r2, r3, r4, r5) = (r[d + i], r[2 * d + i], r[3 * d + i], r[4 * d + i]);
            let a = r4 + theta1 * r5;
            let da = -r5;
            let bb = r3 + theta * a;
            let db = a + theta * da;
            let c = r2 + theta1 * bb;
            let dc = -bb + theta1 * db;
            out[i] = (c + theta * dc) / h;
        }
    }
}

fn rms_error(err: &[f64], y0: &[f64], y1: &[f64], opts: &OdeOptions) -> f64 {
    let n = err.len() as f64;
    let sum: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = opts.abs_tol + opts.rel_tol * a.abs().max(b.abs());
            let q = e / sc;
            q * q
        })
        .sum();
    libm::sqrt(sum / n)
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Integrates the problem from `x_start` to `x_end` (either direction).
pub fn integrate<F>(problem: &OdeProblem<F>) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let opts = problem.options;
    opts.validate()?;
    let dim = problem.dimension();
    if dim == 0 {
        return Err(Error::InvalidArgument("ODE state must be non-empty"));
    }
    let field = &problem.field;
    let (x0, x_end) = (problem.x_start, problem.x_end);
    let span = x_end - x0;
    let mut y = problem.initial_state.clone();

    let mut k1 = vec![0.0; dim];
    field(x0, &y, &mut k1)?;
    if !all_finite(&k1) || !all_finite(&y) {
        return Err(Error::NonFiniteField { x: x0 });
    }

    let mut traj = Trajectory {
        dim,
        xs: vec![x0],
        states: y.clone(),
        derivs: k1.clone(),
        dense: Vec::new(),
        function_evaluations: 1,
        rejected_steps: 0,
    };
    if span == 0.0 {
        return Ok(traj);
    }

    let dir = span.signum();
    let h_floor = 1e-14 * span.abs();
    let mut h = initial_step(field, x0, &y, &k1, dir, span.abs(), &opts, &mut traj.function_evaluations)?;

    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut k5 = vec![0.0; dim];
    let mut k6 = vec![0.0; dim];
    let mut k7 = vec![0.0; dim];
    let mut ytmp = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    let mut err = vec![0.0; dim];

    let mut x = x0;
    let mut last_failure: Option<Error> = None;
    let mut steps = 0usize;
    let mut reject_streak = false;

    loop {
        if steps >= opts.max_steps {
            return Err(Error::StepSizeUnderflow { x });
        }
        let remaining = x_end - x;
        if remaining * dir <= 0.0 {
            break;
        }
        let mut last = false;
        if (h.abs() * 1.01) >= remaining.abs() {
            h = remaining;
            last = true;
        }
        if h.abs() < h_floor && !last {
            return Err(last_failure.unwrap_or(Error::StepSizeUnderflow { x }));
        }

        let stage = |xs: f64, yin: &[f64], out: &mut [f64]| -> Result<()> {
            field(xs, yin, out)?;
            if all_finite(out) {
                Ok(())
            } else {
                Err(Error::NonFiniteField { x: xs })
            }
        };

        let attempt = (|| -> Result<()> {
            for i in 0..dim {
                ytmp[i] = y[i] + h * A21 * k1[i];
            }
            stage(x + C2 * h, &ytmp, &mut k2)?;
            for i in 0..dim {
                ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
            }
            stage(x + C3 * h, &ytmp, &mut k3)?;
            for i in 0..dim {
                ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            stage(x + C4 * h, &ytmp, &mut k4)?;
            for i in 0..dim {
                ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            stage(x + C5 * h, &ytmp, &mut k5)?;
            for i in 0..dim {
                ytmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            let x_next = if last { x_end } else { x + h };
            stage(x_next, &ytmp, &mut k6)?;
            for i in 0..dim {
                y_new[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
            }
            if !all_finite(&y_new) {
                return Err(Error::NonFiniteField { x: x_next });
            }
            stage(x_next, &y_new, &mut k7)?;
            for i in 0..dim {
                err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            }
            Ok(())
        })();
        traj.function_evaluations += 6;
        steps += 1;

        let err_norm = match attempt {
            Ok(()) => rms_error(&err, &y, &y_new, &opts),
            Err(e) => {
                last_failure = Some(e);
                traj.rejected_steps += 1;
                h *= 0.25;
                reject_streak = true;
                continue;
            }
        };

        if err_norm <= 1.0 {
            let x_next = if last { x_end } else { x + h };
            // Dense-output coefficients for the accepted step.
            traj.dense.extend_from_slice(&y);
            for i in 0..dim {
                traj.dense.push(y_new[i] - y[i]);
            }
            for i in 0..dim {
                traj.dense.push(h * k1[i] - (y_new[i] - y[i]));
            }
            for i in 0..dim {
                let ydiff = y_new[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                traj.dense.push(ydiff - h * k7[i] - bspl);
            }
            for i in 0..dim {
                traj.dense
                    .push(h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]));
            }
            x = x_next;
            y.copy_from_slice(&y_new);
            k1.copy_from_slice(&k7);
            traj.xs.push(x);
            traj.states.extend_from_slice(&y);
            traj.derivs.extend_from_slice(&k1);
            last_failure = None;
            if last {
                break;
            }
            let mut factor = 0.9 * libm::pow(err_norm.max(1e-10), -0.2);
            factor = factor.clamp(0.2, 5.0);
            if reject_streak {
                factor = factor.min(1.0);
            }
            reject_streak = false;
            h *= factor;
        } else {
            traj.rejected_steps += 1;
            let factor = (0.9 * libm::pow(err_norm, -0.2)).max(0.2);
            h *= factor;
            reject_streak = true;
            last_failure = None;
        }
    }
    Ok(traj)
}

// Starting step after Hairer, Nørsett & Wanner (II.4).
#[allow(clippy::too_many_arguments)]
fn initial_step<F>(
    field: &F,
    x0: f64,
    y0: &[f64],
    f0: &[f64],
    dir: f64,
    span: f64,
    opts: &OdeOptions,
    evaluations: &mut usize,
) -> Result<f64>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let dim = y0.len();
    let scale = |i: usize| opts.abs_tol + opts.rel_tol * y0[i].abs();
    let norm = |v: &[f64]| {
        let s: f64 = v.iter().enumerate().map(|(i, x)| (x / scale(i)) * (x / scale(i))).sum();
        libm::sqrt(s / dim as f64)
    };
    let d0 = norm(y0);
    let d1 = norm(f0);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span);
    let y1: Vec<f64> = (0..dim).map(|i| y0[i] + dir * h0 * f0[i]).collect();
    let mut f1 = vec![0.0; dim];
    *evaluations += 1;
    if field(x0 + dir * h0, &y1, &mut f1).is_err() || !all_finite(&f1) {
        return Ok(dir * (h0 * 1e-3).max(1e-14 * span));
    }
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let dmax = d1.max(d2);
    let h1 = if dmax <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { libm::pow(0.01 / dmax, 0.2) };
    Ok(dir * (100.0 * h0).min(h1).min(span))
}
