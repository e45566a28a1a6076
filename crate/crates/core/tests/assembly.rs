mod common;

use common::*;
use qhj_core::assembly::{self, export_series, Branch, SeriesSelector, DEFAULT_EXPORT_POINTS};
use qhj_core::benchmarks::{QUARTIC_N2_TURNING_POINT, QUARTIC_LEVELS};
use qhj_core::reference::{classical_action, numerov_solve};
use qhj_core::Error;

fn simpson_norm(wf: &qhj_core::PiecewiseWavefunction) -> f64 {
    let (lo, hi) = wf.domain();
    let tp = wf.turning_points();
    // Piecewise so no panel straddles a turning point.
    [(lo, tp.x1), (tp.x1, tp.x2), (tp.x2, hi)].iter().map(|&(a, b)| simpson(|x| wf.psi(x).powi(2), a, b, 20_000)).sum()
}

#[test]
fn harmonic_ground_state_is_the_gaussian() {
    let spec = harmonic();
    let r = solve(&spec, 0);
    let mut wf = assemble_at(&spec, &r, r.b_used);
    let exact = |x: f64| std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    wf.align_sign_with(exact);
    let (lo, hi) = wf.domain();
    let sup = grid(lo, hi, 4000).map(|x| (wf.psi(x) - exact(x)).abs()).fold(0.0, f64::max);
    assert!(sup < 1e-6, "{sup}");
    assert!(wf.node_positions().is_empty());
}

#[test]
fn table_states_match_numerov() {
    for l in QUARTIC_LEVELS.iter() {
        let spec = quartic(l.lambda);
        let r = solve(&spec, l.n);
        let nu = numerov_solve(&spec, &unit(), l.n, 1e-12).unwrap();
        let mut wf = assemble_at(&spec, &r, r.b_used);
        let sup = sup_vs_numerov(&mut wf, &nu);
        assert!(sup <= 1e-4, "lambda {} n {}: {sup}", l.lambda, l.n);
    }
}

#[test]
fn continuity_norm_and_tail() {
    for l in QUARTIC_LEVELS.iter() {
        let spec = quartic(l.lambda);
        let r = solve(&spec, l.n);
        let wf = assemble_at(&spec, &r, r.b_used);
        let j = wf.jumps();
        assert!(j.max_value() <= 1e-8, "{j:?}");
        assert!(j.max_derivative() <= 1e-6, "{j:?}");
        assert!((wf.norm_squared() - 1.0).abs() < 1e-8);
        assert!((simpson_norm(&wf) - 1.0).abs() < 1e-7);
    }
    // Beyond the last extremum the right tail decays to 0 from one side.
    let spec = quartic(1.0);
    let wf = assemble_at(&spec, &solve(&spec, 2), 2.0);
    let (_, hi) = wf.domain();
    let x2 = wf.turning_points().x2;
    let sign = wf.psi(x2).signum();
    let mut prev = f64::INFINITY;
    for x in grid(x2, hi, 500) {
        let v = sign * wf.psi(x);
        assert!(v > 0.0 && v < prev, "x {x}");
        prev = v;
    }
}

#[test]
fn quartic_n2_turning_points_and_nodes() {
    let spec = quartic(1.0);
    let r = solve(&spec, 2);
    assert!((r.turning_points.x2 - QUARTIC_N2_TURNING_POINT).abs() < 1e-4);
    assert!((r.turning_points.x1 + QUARTIC_N2_TURNING_POINT).abs() < 1e-4);
    let bs = assembly::b_star_for(&r, &spec, &unit(), &cfg()).unwrap();
    let nu = numerov_solve(&spec, &unit(), 2, 1e-12).unwrap();
    let base = assembly::node_positions(&assemble_at(&spec, &r, bs.b_star));
    assert_eq!(base.len(), 2);
    assert!((base[0] + base[1]).abs() < 1e-7);
    for (a, b) in base.iter().zip(&nu.nodes) {
        assert!((a - b).abs() < 1e-4);
    }
    for f in [0.5, 2.0] {
        let other = assemble_at(&spec, &r, f * bs.b_star).node_positions();
        for (a, b) in base.iter().zip(&other) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }
}

#[test]
fn parity_of_table_states() {
    for l in QUARTIC_LEVELS.iter() {
        let spec = quartic(l.lambda);
        let r = solve(&spec, l.n);
        let wf = assemble_at(&spec, &r, r.b_used);
        let s = if l.n % 2 == 0 { 1.0 } else { -1.0 };
        let (_, hi) = wf.domain();
        for x in grid(0.0, hi, 400) {
            assert!((wf.psi(-x) - s * wf.psi(x)).abs() < 1e-6, "lambda {} n {} x {x}", l.lambda, l.n);
        }
    }
}

#[test]
fn series_identities() {
    let spec = quartic(1.0);
    let r = solve(&spec, 2);
    let bs = assembly::b_star_for(&r, &spec, &unit(), &cfg()).unwrap();
    let wf = assemble_at(&spec, &r, bs.b_star);
    let ca = classical_action(&spec, &unit(), r.energy).unwrap();
    let get = |sel| export_series(&wf, Some(&bs), Some(&ca), sel, DEFAULT_EXPORT_POINTS).unwrap();

    let psi = get(SeriesSelector::Psi);
    let env = get(SeriesSelector::Envelope);
    assert_eq!(psi.rows.len(), DEFAULT_EXPORT_POINTS);
    let (s, e) = (env.column("sine_factor").unwrap(), env.column("inv_sqrt_X_prime").unwrap());
    let p = psi.column("psi").unwrap();
    for (i, row) in psi.rows.iter().enumerate() {
        match row.branch {
            Branch::II => assert!((s[i].unwrap() * e[i].unwrap() - p[i].unwrap()).abs() <= 1e-10),
            _ => assert!(s[i].is_none() && e[i].is_none()),
        }
    }

    let mom = get(SeriesSelector::Momentum);
    let xp = mom.column("X_prime").unwrap();
    let n = mom.rows.len();
    for i in 0..n {
        if let (Some(a), Some(b)) = (xp[i], xp[n - 1 - i]) {
            assert!((a - b).abs() < 1e-7, "row {i}");
        }
    }
    let pc = ca.momentum(r.turning_points.x2).unwrap();
    assert_eq!(pc, 0.0);
    assert_eq!(ca.momentum(r.turning_points.x1).unwrap(), 0.0);

    let act = get(SeriesSelector::ActionReal);
    let (x, w) = (act.column("X").unwrap(), act.column("W_C").unwrap());
    let first = act.rows.iter().position(|r| r.branch == Branch::II).unwrap();
    assert!(x[first].unwrap().abs() < 1e-2 && w[first].unwrap().abs() < 1e-2);
    assert_eq!(wf.allowed().phase(r.turning_points.x1), 0.0);
    assert_eq!(ca.at(r.turning_points.x1), 0.0);
    let d: Vec<f64> = x.iter().zip(&w).filter_map(|(a, b)| Some(a.as_ref()? - b.as_ref()?)).collect();
    assert!(d.iter().any(|&v| v > 0.0) && d.iter().any(|&v| v < 0.0));

    let imag = get(SeriesSelector::ActionImag);
    let y = imag.column("Y").unwrap();
    for (i, row) in imag.rows.iter().enumerate() {
        let amp = (-y[i].unwrap()).exp();
        if row.branch == Branch::II {
            assert!((amp - wf.allowed().amplitude().abs() * e[i].unwrap()).abs() <= 1e-10 * amp);
        } else {
            assert!((amp - p[i].unwrap().abs()).abs() <= 1e-10 * amp.max(1e-300));
        }
    }
}

#[test]
fn b_star_selectors_need_b_star() {
    let spec = quartic(1.0);
    let r = solve(&spec, 2);
    let wf = assemble_at(&spec, &r, r.b_used);
    let ca = classical_action(&spec, &unit(), r.energy).unwrap();
    for sel in [SeriesSelector::ActionReal, SeriesSelector::Momentum, SeriesSelector::Envelope] {
        let err = export_series(&wf, None, Some(&ca), sel, 11).unwrap_err();
        assert!(matches!(err, Error::SelectorRequiresBStar(_)));
    }
    let bs = assembly::b_star_for(&r, &spec, &unit(), &cfg()).unwrap();
    let err = export_series(&wf, Some(&bs), Some(&ca), SeriesSelector::Momentum, 11).unwrap_err();
    assert!(matches!(err, Error::SelectorRequiresBStar(_)));
    assert!(export_series(&wf, None, None, SeriesSelector::Psi, 11).is_ok());
}
