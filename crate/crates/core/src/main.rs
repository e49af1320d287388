use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use franchise_core::commands::{self, CommandError};
use franchise_core::config::{self, AxisSpec, Config, ConfigError, OracleSettings, OutputFormat};
use franchise_core::sweep::{Execution, SweepKind};

#[derive(Debug, Parser)]
#[command(name = "franchise", version, about = "Property-rights extension game: solve, sweep, simulate, verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,

    /// Override a config key, e.g. `--set g=0.4` or `--set production.beta=0.3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Plot,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Game,
    Dynamics,
    Identity,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the one-shot game.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Solve over a grid of up to two parameters.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Sweep axis, `name=v1,v2,...` or `name=start:stop:steps`; replaces
        /// the config's axes.
        #[arg(long = "axis", value_name = "SPEC")]
        axes: Vec<String>,
        #[arg(long, value_enum, default_value = "game")]
        kind: Kind,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Evaluate points on one thread.
        #[arg(long)]
        serial: bool,
    },
    /// Simulate the repeated game with learning by doing.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Fixed points of the productivity map in both regimes.
    SteadyState {
        #[command(flatten)]
        common: Common,
    },
    /// Solve the in-group altruism variant over group shares.
    Identity {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long = "p-tot")]
        p_tot: Option<f64>,
        /// Comma-separated group shares.
        #[arg(long = "p-grid", value_delimiter = ',')]
        p_grid: Option<Vec<f64>>,
    },
    /// Cross-check the closed form against brute-force backward induction.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        draws: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(common: &Common, extra: &[(String, String)]) -> Result<Config, CommandError> {
    let mut overrides = common
        .overrides
        .iter()
        .map(|s| config::split_assignment(s))
        .collect::<Result<Vec<_>, _>>()?;
    overrides.extend_from_slice(extra);
    let (config, warnings) = Config::load(&common.config, &overrides)?;
    for w in warnings {
        eprintln!("{w}");
    }
    Ok(config)
}

fn parse_axis(text: &str) -> Result<AxisSpec, ConfigError> {
    let (name, spec) = config::split_assignment(text)?;
    let bad = || ConfigError::Parse(format!("bad axis `{text}`"));
    if let [start, stop, steps] = spec.split(':').collect::<Vec<_>>()[..] {
        return Ok(AxisSpec::Range {
            name,
            start: start.parse().map_err(|_| bad())?,
            stop: stop.parse().map_err(|_| bad())?,
            steps: steps.parse().map_err(|_| bad())?,
        });
    }
    let values = spec
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AxisSpec::Values { name, values })
}

fn format_of(flag: Option<Format>, config: &Config) -> OutputFormat {
    match flag {
        Some(Format::Csv) => OutputFormat::Csv,
        Some(Format::Json) => OutputFormat::Json,
        Some(Format::Plot) => OutputFormat::Plot,
        None => config.format,
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CommandError> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(path, text)?;
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CommandError> {
    match cli.command {
        Command::Solve { common, format } => {
            let config = load(&common, &[])?;
            let text = commands::solve(&config, format_of(format, &config))?;
            emit(common.out.as_deref(), &text)
        }
        Command::Sweep {
            common,
            axes,
            kind,
            format,
            serial,
        } => {
            let mut config = load(&common, &[])?;
            if !axes.is_empty() {
                config.axes = axes.iter().map(|a| parse_axis(a)).collect::<Result<_, _>>()?;
                // re-validate with the new axes
                config = Config::from_value(&config.to_value())?.0;
            }
            let kind = match kind {
                Kind::Game => SweepKind::Game,
                Kind::Dynamics => SweepKind::Dynamics,
                Kind::Identity => SweepKind::Identity,
            };
            let execution = if serial { Execution::Serial } else { Execution::Parallel };
            let format = format_of(format, &config);
            let output = commands::sweep(&config, kind, format, execution)?;
            emit(common.out.as_deref(), &output.table)?;
            if format == OutputFormat::Plot {
                let base = common.out.clone().unwrap_or_else(|| PathBuf::from("sweep"));
                let dir = base.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
                let stem = base
                    .file_stem()
                    .map_or_else(|| "sweep".to_string(), |s| s.to_string_lossy().into_owned());
                std::fs::create_dir_all(dir)?;
                for (column, text) in &output.plot_files {
                    std::fs::write(dir.join(format!("{stem}_{column}.dat")), text)?;
                }
            }
            Ok(())
        }
        Command::Simulate { common } => {
            let config = load(&common, &[])?;
            emit(common.out.as_deref(), &commands::simulate(&config)?)
        }
        Command::SteadyState { common } => {
            let config = load(&common, &[])?;
            emit(common.out.as_deref(), &commands::steady_state(&config)?)
        }
        Command::Identity {
            common,
            alpha,
            p_tot,
            p_grid,
        } => {
            let mut extra = Vec::new();
            if let Some(a) = alpha {
                extra.push(("alpha".to_string(), a.to_string()));
            }
            if let Some(p) = p_tot {
                extra.push(("p_tot".to_string(), p.to_string()));
            }
            let config = load(&common, &extra)?;
            let (text, diagnostics) = commands::identity(&config, p_grid.as_deref())?;
            for d in diagnostics {
                eprintln!("{d}");
            }
            emit(common.out.as_deref(), &text)
        }
        Command::Verify {
            config: path,
            overrides,
            draws,
            seed,
            out,
        } => {
            let mut settings = match path {
                Some(path) => {
                    let common = Common {
                        config: path,
                        overrides,
                        out: None,
                    };
                    load(&common, &[])?.oracle
                }
                None => OracleSettings {
                    draws: config::DEFAULT_DRAWS,
                    seed: config::DEFAULT_SEED,
                    e_steps: config::DEFAULT_E_STEPS,
                    max_effort_step: config::DEFAULT_MAX_EFFORT_STEP,
                },
            };
            if let Some(d) = draws {
                settings.draws = d;
            }
            if let Some(s) = seed {
                settings.seed = s;
            }
            let (text, summary) = commands::verify(&settings)?;
            emit(out.as_deref(), &text)?;
            if summary.agreements != summary.draws {
                eprintln!(
                    "verify: {} of {} draws disagree",
                    summary.draws - summary.agreements,
                    summary.draws
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
