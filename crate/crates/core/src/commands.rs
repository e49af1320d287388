//! Subcommand bodies. Each renders its complete output as text so the
//! binary only has to parse arguments and write bytes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::{Config, ConfigError, OracleSettings, OutputFormat};
use crate::dynamics::{self, Terminal};
use crate::game;
use crate::identity;
use crate::oracle::{self, GridSpec};
use crate::report::{fmt_f64, plot_data, Cell, Table};
use crate::sweep::{self, Execution, SweepKind, SweepSpec};

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Domain(#[from] crate::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CommandError {
    pub fn code(&self) -> &'static str {
        match self {
            CommandError::Config(e) => e.code(),
            CommandError::Domain(e) => e.code(),
            CommandError::Io(_) => "io_error",
        }
    }

    /// Process exit status for this error class.
    pub fn exit_code(&self) -> i32 {
        match self.code() {
            "missing_file" => 3,
            "parse_error" => 4,
            "constraint_violation" => 5,
            "domain_error" => 6,
            "io_error" => 7,
            _ => 1,
        }
    }
}

pub type CommandResult<T> = Result<T, CommandError>;

fn render(table: &Table, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => table.to_json_string(),
        OutputFormat::Csv | OutputFormat::Plot => table.to_csv_string(),
    }
}

pub fn solve(config: &Config, format: OutputFormat) -> CommandResult<String> {
    let o = game::solve_equilibrium(&config.game)?;
    let mut table = Table::new(&game::EquilibriumOutcome::COLUMNS, 0);
    table.push(sweep::outcome_cells(&o));
    Ok(render(&table, format))
}

/// Rendered sweep: the main table plus, for plot output, one data file per
/// dependent column as `(column, text)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub table: String,
    pub plot_files: Vec<(String, String)>,
}

pub fn sweep(
    config: &Config,
    kind: SweepKind,
    format: OutputFormat,
    execution: Execution,
) -> CommandResult<SweepOutput> {
    let spec = SweepSpec {
        execution,
        ..SweepSpec::from_config(config, kind)
    };
    let table = sweep::run_sweep(&spec)?;
    let plot_files = if format == OutputFormat::Plot {
        plot_data(&table)
    } else {
        Vec::new()
    };
    Ok(SweepOutput {
        table: render(&table, format),
        plot_files,
    })
}

/// Per-period CSV followed by a `# terminal=...` footer line.
pub fn simulate(config: &Config) -> CommandResult<String> {
    let traj = dynamics::simulate(&config.dyn_params())?;
    let mut table = Table::new(&dynamics::PeriodRecord::COLUMNS, 0);
    for r in &traj.periods {
        table.push(vec![
            Cell::Int(r.t as i64),
            r.a.into(),
            r.e0.into(),
            r.e.into(),
            r.v.as_str().into(),
            r.i_e.into(),
            r.i_d.into(),
            r.i_bar.into(),
            r.y.into(),
        ]);
    }
    let mut out = table.to_csv_string();
    let a_final = match traj.terminal {
        Terminal::Converged { a_final } => fmt_f64(a_final),
        _ => "nan".into(),
    };
    let transition = traj
        .transition_period
        .map_or_else(|| "none".to_string(), |t| t.to_string());
    out.push_str(&format!(
        "# terminal={} a_final={} transition_period={} periods={}\n",
        traj.terminal.as_str(),
        a_final,
        transition,
        traj.periods.len()
    ));
    Ok(out)
}

/// Low- and high-regime fixed points as `(regime, a_ss, stability, residual)`.
pub fn steady_state(config: &Config) -> CommandResult<String> {
    let p = config.dyn_params();
    let mut table = Table::new(&["regime", "a_ss", "stability", "residual"], 0);
    for report in [dynamics::low_steady_states(&p)?, dynamics::high_steady_states(&p)?] {
        for fp in &report.fixed_points {
            table.push(vec![
                report.regime.as_str().into(),
                fp.a.into(),
                fp.stability.as_str().into(),
                fp.residual.into(),
            ]);
        }
    }
    Ok(table.to_csv_string())
}

/// Identity sweep over `p_grid` (or the configured `p_tot` alone). Returns
/// the CSV text and one diagnostic per skipped grid point.
pub fn identity(config: &Config, p_grid: Option<&[f64]>) -> CommandResult<(String, Vec<String>)> {
    let ip = config.identity_params();
    let single = [ip.p_tot];
    let grid = p_grid.unwrap_or(&single);
    let result = identity::sweep_group_size(&ip, grid);
    let mut table = Table::new(&identity::GroupSizeRow::COLUMNS, 1);
    for r in &result.rows {
        table.push(vec![
            r.p_tot.into(),
            r.alpha.into(),
            r.e_p.into(),
            r.decision.as_str().into(),
            r.u_e_incl.into(),
            r.u_e_extr.into(),
        ]);
    }
    let mut diagnostics: Vec<String> = result
        .skipped
        .iter()
        .map(|(p, why)| format!("skipped p_tot={}: {why}", fmt_f64(*p)))
        .collect();
    diagnostics.extend(
        result
            .rows
            .iter()
            .filter(|r| r.degenerate)
            .map(|r| format!("degenerate p_tot={}: whole group starts in the elite", fmt_f64(r.p_tot))),
    );
    Ok((table.to_csv_string(), diagnostics))
}

pub const VERIFY_COLUMNS: [&str; 18] = [
    "draw",
    "n",
    "e0",
    "m",
    "a",
    "g",
    "family",
    "e_star",
    "e_star_grid",
    "v_star",
    "v_star_grid",
    "pi_e",
    "pi_e_grid",
    "i_e_grid",
    "i_d_grid",
    "pi_d_grid",
    "agrees",
    "max_payoff_gap",
];

/// Summary of a verification run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifySummary {
    pub draws: usize,
    pub agreements: usize,
    pub max_gap: f64,
}

/// Random-draw cross-check of the closed-form solver against backward
/// induction: one CSV row per draw, then a `# summary ...` line.
pub fn verify(settings: &OracleSettings) -> CommandResult<(String, VerifySummary)> {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let draws: Vec<_> = (0..settings.draws)
        .map(|_| oracle::random_params(&mut rng))
        .collect();
    let mut table = Table::new(&VERIFY_COLUMNS, 0);
    let mut summary = VerifySummary {
        draws: settings.draws,
        agreements: 0,
        max_gap: 0.0,
    };
    for (k, p) in draws.iter().enumerate() {
        let grid = GridSpec::with_max_effort_step(p, settings.e_steps, settings.max_effort_step)?;
        let r = oracle::solve_by_backward_induction(p, &grid)?;
        summary.agreements += r.agrees as usize;
        summary.max_gap = summary.max_gap.max(r.max_payoff_gap);
        table.push(vec![
            Cell::Int(k as i64),
            Cell::Int(p.n as i64),
            p.e0.into(),
            p.m.into(),
            p.a.into(),
            p.g.into(),
            p.production.name().into(),
            r.analytic.e_star.into(),
            r.e_star_grid.into(),
            r.analytic.v_star.as_str().into(),
            r.v_star.as_str().into(),
            r.analytic.pi_e.into(),
            r.pi_e_grid.into(),
            r.i_e_grid.into(),
            r.i_d_grid.into(),
            r.pi_d_grid.into(),
            r.agrees.into(),
            r.max_payoff_gap.into(),
        ]);
    }
    let mut out = table.to_csv_string();
    out.push_str(&format!(
        "# summary draws={} agreements={} max_gap={}\n",
        summary.draws,
        summary.agreements,
        fmt_f64(summary.max_gap)
    ));
    Ok((out, summary))
}
