use proptest::prelude::*;
use qhj_core::{OdeOptions, OdeProblem, Result};

fn exp_error(rel: f64) -> f64 {
    let p = OdeProblem::new(
        |_x: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
            dy[0] = y[0];
            Ok(())
        },
        0.0,
        1.0,
        vec![1.0],
        OdeOptions::with_tolerances(rel, 1e-2 * rel),
    );
    (p.integrate().unwrap().final_state()[0] - std::f64::consts::E).abs()
}

fn riccati_error(rel: f64) -> f64 {
    let p = OdeProblem::new(
        |x: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
            dy[0] = -2.0 * x * y[0] * y[0];
            Ok(())
        },
        0.0,
        2.0,
        vec![1.0],
        OdeOptions::with_tolerances(rel, 1e-2 * rel),
    );
    (p.integrate().unwrap().final_state()[0] - 0.2).abs()
}

fn oscillator_error(rel: f64) -> f64 {
    let p = OdeProblem::new(
        |_x: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
            dy[0] = y[1];
            dy[1] = -y[0];
            Ok(())
        },
        0.0,
        2.0 * std::f64::consts::PI,
        vec![1.0, 0.0],
        OdeOptions::with_tolerances(rel, 1e-2 * rel),
    );
    let end = p.integrate().unwrap();
    let s = end.final_state();
    (s[0] - 1.0).abs().max(s[1].abs())
}

#[test]
fn tighter_tolerances_reduce_global_error() {
    for f in [exp_error as fn(f64) -> f64, riccati_error, oscillator_error] {
        let errs: Vec<f64> = [1e-5, 1e-7, 1e-9].iter().map(|&r| f(r)).collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    }
}

#[test]
fn dense_output_reproduces_nodes_in_both_directions() {
    for (a, b) in [(0.0, 3.0), (3.0, 0.0)] {
        let p = OdeProblem::new(
            |x: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
                dy[0] = y[1];
                dy[1] = -(1.0 + x) * y[0];
                Ok(())
            },
            a,
            b,
            vec![1.0, 0.5],
            OdeOptions::default(),
        );
        let t = p.integrate().unwrap();
        let xs = t.nodes();
        assert!(xs.windows(2).all(|w| if b > a { w[1] > w[0] } else { w[1] < w[0] }));
        for (i, &x) in xs.iter().enumerate() {
            let s = t.eval(x);
            for (u, v) in s.iter().zip(t.state_at_node(i)) {
                assert!((u - v).abs() <= 1e-12 * v.abs(), "{u} vs {v}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn forward_then_backward_returns(w in 0.2..3.0f64, f in 0.0..2.0f64, y0 in -2.0..2.0f64, span in 0.5..6.0f64) {
        // Forced oscillator: no dissipation, so reversal does not amplify errors.
        let field = move |x: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
            dy[0] = y[1];
            dy[1] = -w * w * y[0] + f * (1.3 * x).sin();
            Ok(())
        };
        let opts = OdeOptions::default();
        let fwd = OdeProblem::new(field, 0.0, span, vec![y0, 0.5], opts).integrate().unwrap();
        let back = OdeProblem::new(field, span, 0.0, fwd.final_state().to_vec(), opts).integrate().unwrap();
        let end = back.final_state();
        let scale = y0.abs().max(1.0);
        prop_assert!((end[0] - y0).abs() <= 100.0 * opts.rel_tol * scale, "{}", end[0] - y0);
        prop_assert!((end[1] - 0.5).abs() <= 100.0 * opts.rel_tol * scale, "{}", end[1] - 0.5);
    }
}
