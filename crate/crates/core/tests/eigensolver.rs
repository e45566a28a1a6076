mod common;

use common::*;
use qhj_core::allowed::default_b;
use qhj_core::benchmarks::QUARTIC_LEVELS;
use qhj_core::eigen;
use qhj_core::potential::find_turning_points;
use qhj_core::reference::{numerov_solve, wkb_energy};
use qhj_core::{Error, PhysicalConstants, PotentialSpec};

#[test]
fn high_harmonic_level() {
    let r = solve(&harmonic(), 7);
    assert!((r.energy - 7.5).abs() < 1e-7, "{}", r.energy);
}

#[test]
fn tabulated_consistent_levels() {
    for (lambda, n) in [(0.002, 0), (0.1, 2)] {
        let want = QUARTIC_LEVELS.iter().find(|l| l.lambda == lambda && l.n == n).unwrap().schrodinger;
        let e = solve(&quartic(lambda), n).energy;
        assert!((e - want).abs() < 5e-6, "lambda {lambda} n {n}: {e}");
    }
}

#[test]
fn mismatch_at_rounded_and_converged_energy() {
    let spec = quartic(1.0);
    let tp = find_turning_points(&spec, QUARTIC_N2_ENERGY).unwrap();
    let b = default_b(QUARTIC_N2_ENERGY, &spec, &unit(), &tp);
    // QUARTIC_N2_ENERGY is rounded 3e-6 above the level, so w is small but not tiny there.
    let w = eigen::mismatch(QUARTIC_N2_ENERGY, b, &spec, &unit(), &cfg()).unwrap();
    assert!(w.abs() < 1e-5, "{w}");
    let r = solve(&spec, 2);
    assert!(r.mismatch_residual <= cfg().mismatch_tol, "{}", r.mismatch_residual);
    for f in [0.5, 1.0, 2.0] {
        assert_eq!(eigen::count_nodes(QUARTIC_N2_ENERGY, f * b, &spec, &unit(), &cfg()).unwrap(), 2);
    }
}

#[test]
fn bracket_encloses_the_level() {
    let spec = quartic(0.002);
    let (lo, hi) = eigen::bracket(1, &spec, &unit(), None, &cfg()).unwrap();
    assert!(lo < 1.5074192 && 1.5074192 < hi, "({lo}, {hi})");
    let wl = eigen::shoot(lo, None, &spec, &unit(), &cfg()).unwrap().w;
    let wh = eigen::shoot(hi, None, &spec, &unit(), &cfg()).unwrap().w;
    assert!(wl * wh < 0.0);
}

#[test]
fn wkb_is_close_and_improves_with_n() {
    for lambda in [0.002, 0.01, 0.1, 1.0] {
        let spec = quartic(lambda);
        let errs: Vec<f64> =
            (0..3).map(|n| (solve(&spec, n).energy - wkb_energy(&spec, &unit(), n).unwrap()).abs()).collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "lambda {lambda}: {errs:?}");
        for (n, e) in errs.iter().enumerate() {
            if (lambda, n) == (1.0, 0) {
                // Independent quadrature gives E_WKB = 0.7042011285, 0.0996 below the level.
                assert!((*e - (0.80377065 - 0.7042011285)).abs() < 1e-6, "{e}");
            } else {
                assert!(*e < 0.05, "lambda {lambda} n {n}: {e}");
            }
        }
    }
}

#[test]
fn levels_order_in_n_and_lambda() {
    for lambda in [0.002, 0.01, 0.1, 1.0] {
        let es: Vec<f64> = (0..4).map(|n| solve(&quartic(lambda), n).energy).collect();
        assert!(es.windows(2).all(|w| w[1] > w[0]), "{es:?}");
    }
    for n in 0..3 {
        let es: Vec<f64> = [0.002, 0.01, 0.1, 1.0].iter().map(|&l| solve(&quartic(l), n).energy).collect();
        assert!(es.windows(2).all(|w| w[1] > w[0]), "{es:?}");
    }
}

#[test]
fn hbar_and_mass_scale_the_spectrum() {
    // V = 2x², m = 2, ħ = ½: ω = √(k/m) = √2.
    let spec = PotentialSpec::harmonic(4.0).unwrap();
    let c = PhysicalConstants::new(0.5, 2.0).unwrap();
    let omega = 2f64.sqrt();
    for n in 0..4 {
        let e = eigen::solve(n, &spec, &c, &cfg()).unwrap().energy;
        assert!((e - 0.5 * omega * (n as f64 + 0.5)).abs() < 1e-7, "n {n}: {e}");
    }
}

#[test]
fn double_well_below_barrier_is_rejected() {
    let spec = PotentialSpec::polynomial(vec![0.0, 0.0, -2.0, 0.0, 1.0]).unwrap();
    let err = eigen::solve(0, &spec, &unit(), &cfg()).unwrap_err();
    assert!(matches!(err, Error::MultipleWells { .. }), "{err:?}");
}

#[test]
fn converges_in_few_iterations() {
    for l in QUARTIC_LEVELS.iter() {
        let r = solve(&quartic(l.lambda), l.n);
        assert!(r.iterations < 20, "lambda {} n {}: {}", l.lambda, l.n, r.iterations);
        assert!(r.bracket.1 - r.bracket.0 <= cfg().tol_e);
    }
}

#[test]
fn general_polynomial_matches_numerov() {
    let spec = PotentialSpec::polynomial(vec![0.0, 0.3, 0.0, 0.0, 1.0]).unwrap();
    for n in 0..3 {
        let e = solve(&spec, n).energy;
        let nu = numerov_solve(&spec, &unit(), n, 1e-10).unwrap().energy;
        assert!((e - nu).abs() < 1e-6, "n {n}: {e} vs {nu}");
    }
}

#[test]
fn fixed_b_gives_the_same_level() {
    let spec = quartic(0.1);
    let auto = solve(&spec, 2).energy;
    for b in [0.5, 2.0, 6.0] {
        let e = eigen::solve_at(2, &spec, &unit(), None, Some(b), &cfg()).unwrap().energy;
        assert!((e - auto).abs() < 1e-7, "b {b}: {e} vs {auto}");
    }
    assert!(matches!(
        eigen::solve_at(2, &spec, &unit(), None, Some(-1.0), &cfg()),
        Err(Error::NonpositiveB { .. })
    ));
}
