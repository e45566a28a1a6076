use qhj_core::assembly::{self, Series, SeriesSelector};
use qhj_core::benchmarks::{QuarticLevel, QUARTIC_LEVELS, TABLE_TOLERANCE};
use qhj_core::reference::{classical_action, numerov_solve, wkb_energy};
use qhj_core::{eigen, PhysicalConstants, PotentialSpec, SolverConfig};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{BPolicy, CommandKind, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Report};

/// Agreement required with the Numerov energy when a tabulated pair is
/// inconsistent.
pub const NUMEROV_ARBITER_TOLERANCE: f64 = 1e-6;

pub fn run(cfg: RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    match cfg.command {
        CommandKind::Eigen => cmd_eigen(cfg),
        CommandKind::Table1 => cmd_table1(cfg),
        CommandKind::Wavefn => cmd_wavefn(cfg),
    }
}

fn columns(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

pub fn cmd_eigen(cfg: RunConfig) -> Result<Report, CliError> {
    let spec = cfg.potential()?.clone();
    let consts = cfg.constants;
    let solver = cfg.solver();
    let fixed_b = match cfg.b {
        BPolicy::Value(b) => Some(b),
        _ => None,
    };
    let with_b_star = cfg.b == BPolicy::BStar;
    let compare = cfg.compare;

    let mut names = vec![
        "n",
        "energy",
        "x1",
        "x2",
        "mismatch_residual",
        "b_used",
        "iterations",
        "function_evaluations",
    ];
    if with_b_star {
        names.extend(["b_star", "delta_x"]);
    }
    if compare.is_some_and(|c| c.numerov()) {
        names.extend(["numerov_energy", "numerov_abs_diff"]);
    }
    if compare.is_some_and(|c| c.wkb()) {
        names.extend(["wkb_energy", "wkb_abs_diff"]);
    }

    let levels: Vec<usize> = cfg.n.iter().collect();
    let rows = levels
        .par_iter()
        .map(|&n| -> Result<Vec<Cell>, CliError> {
            let r = eigen::solve_at(n, &spec, &consts, None, fixed_b, &solver)?;
            let mut row = vec![
                Cell::from(r.n),
                Cell::from(r.energy),
                Cell::from(r.turning_points.x1),
                Cell::from(r.turning_points.x2),
                Cell::from(r.mismatch_residual),
                Cell::from(r.b_used),
                Cell::from(r.iterations),
                Cell::from(r.function_evaluations),
            ];
            if with_b_star {
                let bs = assembly::b_star_for(&r, &spec, &consts, &solver)?;
                row.extend([Cell::from(bs.b_star), Cell::from(bs.delta_x)]);
            }
            if compare.is_some_and(|c| c.numerov()) {
                let e = numerov_solve(&spec, &consts, n, solver.tol_e)?.energy;
                row.extend([Cell::from(e), Cell::from((r.energy - e).abs())]);
            }
            if compare.is_some_and(|c| c.wkb()) {
                let e = wkb_energy(&spec, &consts, n)?;
                row.extend([Cell::from(e), Cell::from((r.energy - e).abs())]);
            }
            Ok(row)
        })
        .collect::<Vec<_>>();

    let mut report = Report::new(cfg, columns(&names));
    for row in rows {
        report.rows.push(row?);
    }
    Ok(report)
}

/// One row of the quartic-oscillator benchmark table.
#[derive(Debug, Clone, Copy)]
pub struct Table1Row {
    pub level: QuarticLevel,
    pub energy: f64,
    pub numerov: f64,
    pub numerov_doubling_change: f64,
}

impl Table1Row {
    /// Compared with the Schrödinger reference value, or with the Numerov
    /// energy where the tabulated pair disagrees with itself.
    pub fn passes(&self) -> bool {
        if self.level.inconsistent() {
            (self.energy - self.numerov).abs() <= NUMEROV_ARBITER_TOLERANCE
        } else {
            (self.energy - self.level.schrodinger).abs() <= TABLE_TOLERANCE
        }
    }
}

pub fn table1_rows(solver: &SolverConfig) -> Result<Vec<Table1Row>, CliError> {
    let consts = PhysicalConstants::default();
    QUARTIC_LEVELS
        .par_iter()
        .map(|level| -> Result<Table1Row, CliError> {
            let spec = PotentialSpec::quartic(1.0, level.lambda)?;
            let r = eigen::solve(level.n, &spec, &consts, solver)?;
            let nu = numerov_solve(&spec, &consts, level.n, solver.tol_e)?;
            Ok(Table1Row {
                level: *level,
                energy: r.energy,
                numerov: nu.energy,
                numerov_doubling_change: nu.grid_doubling_change,
            })
        })
        .collect()
}

pub fn cmd_table1(cfg: RunConfig) -> Result<Report, CliError> {
    let rows = table1_rows(&cfg.solver())?;
    let mut report = Report::new(
        cfg,
        columns(&[
            "lambda",
            "n",
            "energy",
            "numerov_energy",
            "tabulated_method",
            "tabulated_schrodinger",
            "dev_schrodinger",
            "dev_numerov",
            "dev_tabulated_method",
            "numerov_doubling_change",
            "tabulated_pair_inconsistent",
            "arbiter",
            "pass",
        ]),
    );
    report.meta.insert("k".into(), json!(1.0));
    report.meta.insert("tolerance".into(), json!(TABLE_TOLERANCE));
    report.meta.insert("numerov_arbiter_tolerance".into(), json!(NUMEROV_ARBITER_TOLERANCE));
    for r in rows {
        let l = r.level;
        report.rows.push(vec![
            Cell::from(l.lambda),
            Cell::from(l.n),
            Cell::from(r.energy),
            Cell::from(r.numerov),
            Cell::from(l.method),
            Cell::from(l.schrodinger),
            Cell::from(r.energy - l.schrodinger),
            Cell::from(r.energy - r.numerov),
            Cell::from(r.energy - l.method),
            Cell::from(r.numerov_doubling_change),
            Cell::from(l.inconsistent()),
            Cell::from(if l.inconsistent() { "numerov" } else { "schrodinger" }),
            Cell::from(r.passes()),
        ]);
    }
    Ok(report)
}

pub fn cmd_wavefn(cfg: RunConfig) -> Result<Report, CliError> {
    let spec = cfg.potential()?.clone();
    let consts = cfg.constants;
    let solver = cfg.solver();

    let (n, hint) = match cfg.energy {
        Some(e) => (eigen::shoot(e, None, &spec, &consts, &solver)?.allowed_nodes(), Some(e)),
        None => (cfg.n.start, None),
    };
    let r = eigen::solve_with_hint(n, &spec, &consts, hint, &solver)?;
    let b_star = if cfg.b == BPolicy::BStar { Some(assembly::b_star_for(&r, &spec, &consts, &solver)?) } else { None };
    let b = match cfg.b {
        BPolicy::Auto => r.b_used,
        BPolicy::BStar => b_star.expect("computed above").b_star,
        BPolicy::Value(b) => b,
    };
    let wf = assembly::assemble(&r, b, &spec, &consts, &solver)?;

    let mut selectors = vec![SeriesSelector::Psi];
    for s in &cfg.series {
        if !selectors.contains(s) {
            selectors.push(*s);
        }
    }
    let classical = if selectors.iter().any(|s| matches!(s, SeriesSelector::ActionReal | SeriesSelector::Momentum)) {
        Some(classical_action(&spec, &consts, r.energy)?)
    } else {
        None
    };
    let series: Vec<Series> = selectors
        .iter()
        .map(|&s| assembly::export_series(&wf, b_star.as_ref(), classical.as_ref(), s, cfg.points))
        .collect::<Result<_, _>>()?;

    let mut names = vec!["x".to_string(), "branch".to_string()];
    for s in &series {
        names.extend(s.columns.iter().cloned());
    }
    let tp = wf.turning_points();
    let (x_min, x_max) = wf.domain();
    let jumps = wf.jumps();
    let mut meta = serde_json::Map::new();
    meta.insert("n".into(), json!(r.n));
    meta.insert("energy".into(), json!(r.energy));
    meta.insert("x1".into(), json!(tp.x1));
    meta.insert("x2".into(), json!(tp.x2));
    meta.insert("x_min".into(), json!(x_min));
    meta.insert("x_max".into(), json!(x_max));
    meta.insert("b".into(), json!(b));
    if let Some(bs) = &b_star {
        meta.insert("b_star".into(), json!(bs.b_star));
    }
    meta.insert("delta_x".into(), json!(wf.allowed().delta_x()));
    meta.insert("amplitudes".into(), json!(wf.amplitudes()));
    meta.insert("node_positions".into(), json!(wf.node_positions()));
    meta.insert(
        "jumps".into(),
        json!({
            "value_x1": jumps.value_x1,
            "derivative_x1": jumps.derivative_x1,
            "value_x2": jumps.value_x2,
            "derivative_x2": jumps.derivative_x2,
        }),
    );
    if let Some(cl) = &classical {
        meta.insert("classical_action_total".into(), json!(cl.total()));
    }

    let mut report = Report::new(cfg, names);
    report.meta = meta;
    for i in 0..series[0].rows.len() {
        let first = &series[0].rows[i];
        let mut row = vec![Cell::from(first.x), Cell::Text(first.branch.to_string())];
        for s in &series {
            row.extend(s.rows[i].values.iter().map(|&v| Cell::from(v)));
        }
        report.rows.push(row);
    }
    Ok(report)
}

#[cfg(test)]
fn cell_f64(c: &Cell) -> Option<f64> {
    match c {
        Cell::Float(v) => Some(*v),
        _ => None,
    }
}
