#![allow(dead_code)]

use qhj_core::assembly::{self, PiecewiseWavefunction};
use qhj_core::reference::NumerovSolution;
use qhj_core::{eigen, EigenResult, PhysicalConstants, PotentialSpec, SolverConfig};

pub const QUARTIC_N2_ENERGY: f64 = 5.179295;

pub fn unit() -> PhysicalConstants {
    PhysicalConstants::default()
}

pub fn quartic(lambda: f64) -> PotentialSpec {
    PotentialSpec::quartic(1.0, lambda).unwrap()
}

pub fn harmonic() -> PotentialSpec {
    PotentialSpec::harmonic(1.0).unwrap()
}

pub fn cfg() -> SolverConfig {
    SolverConfig::default()
}

pub fn solve(spec: &PotentialSpec, n: usize) -> EigenResult {
    eigen::solve(n, spec, &unit(), &cfg()).unwrap()
}

/// Composite Simpson rule on `m` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// `n + 1` uniform points on `[a, b]`.
pub fn grid(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 })
}

/// Largest `|ψ_QHJ − ψ_Numerov|` over the Numerov box, after sign alignment.
pub fn sup_vs_numerov(wf: &mut PiecewiseWavefunction, nu: &NumerovSolution) -> f64 {
    wf.align_sign_with(|x| nu.psi_at(x));
    grid(nu.x_start, nu.x_end(), 4000).map(|x| (wf.psi(x) - nu.psi_at(x)).abs()).fold(0.0, f64::max)
}

pub fn sup_between(a: &PiecewiseWavefunction, b: &PiecewiseWavefunction) -> f64 {
    let (lo, hi) = a.domain();
    grid(lo, hi, 4000).map(|x| (a.psi(x) - b.psi(x)).abs()).fold(0.0, f64::max)
}

pub fn assemble_at(spec: &PotentialSpec, r: &EigenResult, b: f64) -> PiecewiseWavefunction {
    assembly::assemble(r, b, spec, &unit(), &cfg()).unwrap()
}
