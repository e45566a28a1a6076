//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Outcome of a bracketed root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    /// Final sign-change bracket, ordered `lo <= hi`.
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub evaluations: usize,
}

impl Root {
    pub fn width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }
}

/// Brent's method (inverse quadratic interpolation and secant steps,
/// with bisection whenever the interpolated step would leave the bracket
/// or converge too slowly).
///
/// `fa` and `fb` are the function values at the endpoints and must differ
/// in sign. Iteration stops when the bracket is narrower than `xtol`, or
/// `|f| <= ftol`.
#[allow(clippy::too_many_arguments)]
pub fn brent<F>(
    mut f: F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    xtol: f64,
    ftol: f64,
    max_iter: usize,
) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    if fa.is_nan() || fb.is_nan() || fa * fb > 0.0 {
        return Err(Error::BracketNotFound { what: "brent: endpoints do not straddle a root" });
    }
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for iteration in 0..max_iter {
        if fb * fc > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 || fb.abs() <= ftol {
            return Ok(Root {
                x: b,
                fx: fb,
                bracket: if b < c { (b, c) } else { (c, b) },
                iterations: iteration,
                // One evaluation per completed iteration; the endpoints are supplied.
                evaluations: iteration,
            });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b)?;
        if fb.is_nan() {
            return Err(Error::NaNMismatch { energy: b });
        }
    }
    Err(Error::BracketNotFound { what: "brent: iteration limit reached" })
}

/// Plain bisection for a continuous function with a sign change on `[a, b]`.
pub fn bisect<F>(mut f: F, mut a: f64, mut b: f64, xtol: f64, max_iter: usize) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut fa = f(a)?;
    let fb = f(b)?;
    let mut evaluations = 2;
    if fa * fb > 0.0 {
        return Err(Error::BracketNotFound { what: "bisect: endpoints do not straddle a root" });
    }
    if fa == 0.0 {
        return Ok(Root { x: a, fx: 0.0, bracket: (a, a), iterations: 0, evaluations });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, fx: 0.0, bracket: (b, b), iterations: 0, evaluations });
    }
    let mut iterations = 0;
    while (b - a).abs() > xtol && iterations < max_iter {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(m)?;
        evaluations += 1;
        iterations += 1;
        if fm == 0.0 {
            return Ok(Root { x: m, fx: 0.0, bracket: (m, m), iterations, evaluations });
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let x = 0.5 * (lo + hi);
    Ok(Root { x, fx: f64::NAN, bracket: (lo, hi), iterations, evaluations })
}
