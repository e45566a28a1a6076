mod common;

use std::f64::consts::PI;

use common::*;
use qhj_core::allowed::{find_b_star, LeftBoundary};
use qhj_core::eigen;
use qhj_core::reference::{
    classical_action, classical_momentum, numerov_eigenvalue_on_grid, numerov_solve, staircase_action, wkb_energy,
    NUMEROV_DOUBLING_TOL,
};
use qhj_core::{Error, OdeOptions};

#[test]
fn numerov_reference_levels() {
    let h = numerov_solve(&harmonic(), &unit(), 0, 1e-12).unwrap();
    assert!((h.energy - 0.5).abs() < 1e-9, "{}", h.energy);
    let a = numerov_solve(&quartic(1.0), &unit(), 0, 1e-12).unwrap();
    assert!((a.energy - 0.80377065).abs() < 1e-7, "{}", a.energy);
    let b = numerov_solve(&quartic(0.01), &unit(), 2, 1e-12).unwrap();
    assert!((b.energy - 2.59084580).abs() < 1e-6, "{}", b.energy);
    for s in [h, a, b] {
        assert!(s.grid_doubling_change < NUMEROV_DOUBLING_TOL);
    }
}

#[test]
fn numerov_is_fourth_order() {
    let ns = [256usize, 512, 1024, 2048];
    let errs: Vec<f64> = ns
        .iter()
        .map(|&n| (numerov_eigenvalue_on_grid(&harmonic(), &unit(), 1, n, 1e-15).unwrap() - 1.5).abs())
        .collect();
    // Least-squares slope of log error against log step.
    let xs: Vec<f64> = ns.iter().map(|&n| -(n as f64).ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
    assert!((slope - 4.0).abs() <= 0.3, "slope {slope}, errors {errs:?}");
}

#[test]
fn numerov_solution_is_normalized_and_obeys_recurrence() {
    let spec = quartic(0.1);
    let s = numerov_solve(&spec, &unit(), 3, 1e-12).unwrap();
    assert!((s.norm_squared() - 1.0).abs() < 1e-9);
    // Independent Simpson pass over the samples.
    let m = (s.psi.len() - 1) & !1;
    let mut acc = s.psi[0].powi(2) + s.psi[m].powi(2);
    for i in 1..m {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * s.psi[i].powi(2);
    }
    assert!((acc * s.step / 3.0 - 1.0).abs() < 1e-6);
    let h2 = s.step * s.step;
    let f = |i: usize| 1.0 + h2 / 12.0 * 2.0 * (s.energy - spec.evaluate(s.x(i)));
    let peak = s.psi.iter().fold(0.0f64, |a, p| a.max(p.abs()));
    for i in 1..s.psi.len() - 1 {
        let defect = f(i + 1) * s.psi[i + 1] - (12.0 - 10.0 * f(i)) * s.psi[i] + f(i - 1) * s.psi[i - 1];
        assert!(defect.abs() <= 1e-12 * peak, "i {i}: {defect}");
    }
    assert_eq!(s.nodes.len(), 3);
}

#[test]
fn harmonic_classical_action() {
    let ca = classical_action(&harmonic(), &unit(), 0.5).unwrap();
    assert!((ca.total() - PI / 2.0).abs() < 1e-10, "{}", ca.total());
    let tp = ca.turning_points();
    assert_eq!(ca.at(tp.x1), 0.0);
    let mut prev = -1.0;
    for x in grid(tp.x1, tp.x2, 400) {
        let w = ca.at(x);
        assert!(w > prev || x == tp.x1);
        prev = w;
    }
    let halved = classical_action(&harmonic(), &unit(), 0.5).unwrap().with_layer_width(0.125 * tp.width());
    assert!((halved.total() - ca.total()).abs() < 1e-9);
    assert!((halved.at(0.3) - ca.at(0.3)).abs() < 1e-9);
}

#[test]
fn quartic_classical_vs_quantum_action() {
    let spec = quartic(1.0);
    let ca = classical_action(&spec, &unit(), QUARTIC_N2_ENERGY).unwrap();
    let target = 2.5 * PI;
    assert!((ca.total() - target).abs() < 0.15 * target, "{}", ca.total());
    assert!((ca.total() - target).abs() > 1e-3);
    let tp = ca.turning_points();
    let halved = classical_action(&spec, &unit(), QUARTIC_N2_ENERGY).unwrap().with_layer_width(0.125 * tp.width());
    assert!((halved.total() - ca.total()).abs() < 1e-9);
}

#[test]
fn momentum_vanishes_at_turning_points_while_phase_derivative_does_not() {
    let spec = quartic(1.0);
    let r = solve(&spec, 2);
    let pc = classical_momentum(&spec, &unit(), r.energy).unwrap();
    let tp = pc.turning_points();
    assert_eq!(pc.at(tp.x1).unwrap(), 0.0);
    assert_eq!(pc.at(tp.x2).unwrap(), 0.0);
    assert!((pc.at(0.0).unwrap() - (2.0 * r.energy).sqrt()).abs() < 1e-14);
    assert!(matches!(pc.at(tp.x2 + 0.1), Err(Error::OutsideAllowedRegion { .. })));

    let s = eigen::shoot(r.energy, None, &spec, &unit(), &cfg()).unwrap();
    let lb = LeftBoundary { psi: 1.0, log_derivative: s.left.log_derivative_at_tp() };
    let bs = find_b_star(r.energy, 2, &spec, &unit(), &tp, &lb, &OdeOptions::default()).unwrap();
    let a = eigen::shoot(r.energy, Some(bs.b_star), &spec, &unit(), &cfg()).unwrap().allowed;
    assert!(a.phase_derivative(tp.x1) > 0.0 && a.phase_derivative(tp.x2) > 0.0);
    // At ħ = 1 X' oscillates about p_c; only the averages are close.
    let ca = classical_action(&spec, &unit(), r.energy).unwrap();
    assert!((a.delta_x() - ca.total()).abs() < 0.15 * ca.total());
    let diffs: Vec<f64> = grid(tp.x1, tp.x2, 200).map(|x| a.phase_derivative(x) - pc.at(x).unwrap()).collect();
    assert!(diffs.iter().any(|&d| d > 0.0) && diffs.iter().any(|&d| d < 0.0));
}

#[test]
fn wkb_levels() {
    for n in 0..6 {
        assert!((wkb_energy(&harmonic(), &unit(), n).unwrap() - (n as f64 + 0.5)).abs() < 1e-9);
    }
    let e = wkb_energy(&quartic(1.0), &unit(), 2).unwrap();
    assert!((e - QUARTIC_N2_ENERGY).abs() < 0.05, "{e}");
    // λ → 0 approaches the harmonic value continuously.
    let gaps: Vec<f64> = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
        .iter()
        .map(|&l| (wkb_energy(&quartic(l), &unit(), 1).unwrap() - 1.5).abs())
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[4] < 1e-5, "{gaps:?}");
}

#[test]
fn staircase_steps_at_nodes() {
    let ground = numerov_solve(&quartic(1.0), &unit(), 0, 1e-12).unwrap();
    let s0 = staircase_action(&ground, &unit());
    for x in grid(ground.x_start, ground.x_end(), 100) {
        assert_eq!(s0.at(x), 0.0);
    }
    let sol = numerov_solve(&quartic(1.0), &unit(), 2, 1e-12).unwrap();
    let s = staircase_action(&sol, &unit());
    let z = s.nodes().to_vec();
    assert_eq!(z.len(), 2);
    assert_eq!(s.at(z[0] - 1e-6), 0.0);
    assert_eq!(s.at(z[0] + 1e-6), PI);
    assert_eq!(s.at(z[1] + 1e-6), 2.0 * PI);
    assert_eq!(s.total(), 2.0 * PI);
}
