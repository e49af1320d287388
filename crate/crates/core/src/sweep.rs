//! Parameter sweeps over up to two axes.

use rayon::prelude::*;
use serde_json::Value;

use crate::config::{self, AxisSpec, Config, ConfigError};
use crate::dynamics;
use crate::game::{self, EquilibriumOutcome};
use crate::identity;
use crate::report::{Cell, Table};

/// Which solver runs at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Game,
    Dynamics,
    Identity,
}

impl SweepKind {
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            SweepKind::Game => &EquilibriumOutcome::COLUMNS,
            SweepKind::Dynamics => &[
                "classification",
                "criterion",
                "a_ss_low",
                "terminal",
                "transition_period",
                "consistent",
            ],
            SweepKind::Identity => &["e_p", "decision", "u_e_incl", "u_e_extr", "e_star", "y"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    /// Resolved base config as a key tree; each point overrides the axis keys.
    pub base: Value,
    pub kind: SweepKind,
    pub axes: Vec<AxisSpec>,
    pub execution: Execution,
}

impl SweepSpec {
    pub fn from_config(config: &Config, kind: SweepKind) -> Self {
        SweepSpec {
            base: config.to_value(),
            kind,
            axes: config.axes.clone(),
            execution: Execution::default(),
        }
    }

    /// Grid points in lexicographic axis order: the first axis varies
    /// slowest.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut points: Vec<Vec<f64>> = vec![Vec::new()];
        for axis in &self.axes {
            let values = axis.values();
            points = points
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        points
    }
}

/// Cells in [`EquilibriumOutcome::COLUMNS`] order.
pub fn outcome_cells(o: &EquilibriumOutcome) -> Vec<Cell> {
    vec![
        o.e_star.into(),
        o.v_star.as_str().into(),
        o.i_e.into(),
        o.i_d.into(),
        o.pi_e.into(),
        o.pi_d.into(),
        o.y.into(),
        o.threshold_lhs.into(),
        o.inclusive.into(),
    ]
}

/// Solver output at one resolved point, or the error class and message.
fn evaluate(kind: SweepKind, value: &Value) -> Result<Vec<Cell>, (String, String)> {
    let (config, _) = Config::from_value(value).map_err(|e| (e.code().to_string(), e.to_string()))?;
    let domain = |e: crate::Error| (e.code().to_string(), e.to_string());
    match kind {
        SweepKind::Game => game::solve_equilibrium(&config.game)
            .map(|o| outcome_cells(&o))
            .map_err(domain),
        SweepKind::Identity => identity::solve_equilibrium_identity(&config.identity_params())
            .map(|s| {
                vec![
                    s.e_p.into(),
                    s.decision().as_str().into(),
                    s.u_e_incl.into(),
                    s.u_e_extr.into(),
                    s.outcome.e_star.into(),
                    s.outcome.y.into(),
                ]
            })
            .map_err(domain),
        SweepKind::Dynamics => dynamics::classify_long_run(&config.dyn_params())
            .map(|r| {
                vec![
                    r.classification.as_str().into(),
                    r.criterion.map_or(Cell::Empty, Cell::Num),
                    r.a_ss_low.map_or(Cell::Empty, Cell::Num),
                    r.terminal.as_str().into(),
                    r.transition_period.into(),
                    r.consistent.map_or(Cell::Empty, Cell::Bool),
                ]
            })
            .map_err(domain),
    }
}

fn point_row(spec: &SweepSpec, point: &[f64]) -> Vec<Cell> {
    let width = spec.kind.columns().len();
    let mut row: Vec<Cell> = point.iter().map(|&x| Cell::Num(x)).collect();
    let mut value = spec.base.clone();
    let mut result: Result<Vec<Cell>, (String, String)> = Ok(Vec::new());
    for (axis, &x) in spec.axes.iter().zip(point) {
        if let Err(e) = config::set_key(&mut value, axis.name(), config::number_value(x)) {
            result = Err((e.code().to_string(), e.to_string()));
        }
    }
    if result.is_ok() {
        result = evaluate(spec.kind, &value);
    }
    match result {
        Ok(cells) => {
            row.extend(cells);
            row.push(Cell::Empty);
        }
        Err((code, _)) => {
            row.extend(std::iter::repeat_n(Cell::Empty, width));
            row.push(Cell::Text(code));
        }
    }
    row
}

/// Evaluates every grid point. Failed points become rows with an
/// `error_code` and empty result cells. Row order never depends on
/// `spec.execution`.
pub fn run_sweep(spec: &SweepSpec) -> Result<Table, ConfigError> {
    let columns: Vec<&str> = spec
        .axes
        .iter()
        .map(AxisSpec::name)
        .chain(spec.kind.columns().iter().copied())
        .chain(std::iter::once("error_code"))
        .collect();
    let mut table = Table::new(&columns, spec.axes.len());
    let points = spec.points();
    let rows: Vec<Vec<Cell>> = match spec.execution {
        Execution::Serial => points.iter().map(|p| point_row(spec, p)).collect(),
        Execution::Parallel => points.par_iter().map(|p| point_row(spec, p)).collect(),
    };
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn base() -> Config {
        let v = json!({"n": 10, "e0": 1.0, "m": 1.0, "a": 2.0, "g": 0.5,
                       "production": {"family": "isoelastic", "beta": 0.5}});
        Config::from_value(&v).unwrap().0
    }

    #[test]
    fn no_axes_is_one_solve() {
        let spec = SweepSpec::from_config(&base(), SweepKind::Game);
        let t = run_sweep(&spec).unwrap();
        assert_eq!(t.rows.len(), 1);
        let o = game::solve_equilibrium(&base().game).unwrap();
        assert_eq!(t.rows[0][..9], outcome_cells(&o)[..]);
        assert_eq!(t.rows[0][9], Cell::Empty);
    }

    #[test]
    fn lexicographic_order() {
        let mut spec = SweepSpec::from_config(&base(), SweepKind::Game);
        spec.axes = vec![
            AxisSpec::Values { name: "g".into(), values: vec![0.3, 0.6] },
            AxisSpec::Values { name: "m".into(), values: vec![1.0, 2.0, 3.0] },
        ];
        let pts = spec.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], vec![0.3, 1.0]);
        assert_eq!(pts[2], vec![0.3, 3.0]);
        assert_eq!(pts[3], vec![0.6, 1.0]);
    }

    #[test]
    fn bad_points_become_error_rows() {
        let mut spec = SweepSpec::from_config(&base(), SweepKind::Game);
        spec.axes = vec![AxisSpec::Values { name: "g".into(), values: vec![0.05, 0.5, 1.2] }];
        let t = run_sweep(&spec).unwrap();
        let err = t.column("error_code").unwrap();
        assert_eq!(t.rows[0][err], Cell::Text("constraint_violation".into()));
        assert_eq!(t.rows[1][err], Cell::Empty);
        assert_eq!(t.rows[2][err], Cell::Text("constraint_violation".into()));
        assert_eq!(t.rows[0][1], Cell::Empty);
    }

    #[test]
    fn integer_axis() {
        let mut spec = SweepSpec::from_config(&base(), SweepKind::Game);
        spec.axes = vec![AxisSpec::Values { name: "n".into(), values: vec![5.0, 20.0] }];
        let t = run_sweep(&spec).unwrap();
        let err = t.column("error_code").unwrap();
        assert!(t.rows.iter().all(|r| r[err] == Cell::Empty));
    }

    #[test]
    fn serial_matches_parallel() {
        let mut spec = SweepSpec::from_config(&base(), SweepKind::Identity);
        spec.axes = vec![AxisSpec::Range { name: "p_tot".into(), start: 0.2, stop: 1.0, steps: 17 }];
        spec.execution = Execution::Serial;
        let serial = run_sweep(&spec).unwrap().to_csv_string();
        spec.execution = Execution::Parallel;
        assert_eq!(serial, run_sweep(&spec).unwrap().to_csv_string());
    }
}
