use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hetshrink::config::{preset, ScenarioConfig, PRESETS};
use hetshrink::{commands, output, CliError};

/// Minimax shrinkage estimation of a heteroscedastic normal mean.
#[derive(Parser)]
#[command(name = "hetshrink", version)]
struct Cli {
    /// Scenario file (TOML).
    #[arg(long, global = true, value_name = "PATH", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario instead of a file; see `hetshrink presets`.
    #[arg(long, global = true, value_name = "NAME")]
    preset: Option<String>,
    /// Overrides the scenario seed.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Overrides the number of Monte Carlo replications.
    #[arg(long = "n-rep", global = true, value_name = "N")]
    n_rep: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the optimal direction, cutoff and M-sequence as JSON.
    SolveDirection,
    /// Apply every configured estimator to one observation.
    Estimate {
        /// Comma-separated observation, e.g. `--x 1,2.5,-3`.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        x: Vec<f64>,
    },
    /// Monte Carlo risk curves; writes to `--out`, else the scenario's output_path, else stdout.
    RiskCurves {
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Closed-form risk bounds for the scenario's variances and prior.
    BoundsTable {
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// List the built-in scenarios.
    Presets,
}

fn with_output(
    path: Option<&Path>,
    f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<(), CliError> {
    fn io(p: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |e| CliError::Io {
            path: p.to_path_buf(),
            source: e,
        }
    }
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(io(p))?);
            f(&mut w).and_then(|_| w.flush()).map_err(io(p))
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            f(&mut w).map_err(io(Path::new("<stdout>")))
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Command::Presets = cli.command {
        return with_output(cli.out.as_deref(), |w| {
            PRESETS
                .iter()
                .try_for_each(|(name, _)| writeln!(w, "{name}"))
        });
    }
    let mut cfg = match (&cli.config, &cli.preset) {
        (Some(path), _) => ScenarioConfig::load(path)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => {
            return Err(CliError::Config(
                "either --config or --preset is required".into(),
            ))
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(n) = cli.n_rep {
        cfg.n_rep = n;
    }
    let scenario = cfg.resolve()?;
    let out = cli.out.as_deref();
    match cli.command {
        Command::SolveDirection => {
            let sol = commands::solve_direction(&scenario)?;
            with_output(out, |w| output::write_json(w, &sol))
        }
        Command::Estimate { x } => {
            let records = commands::estimate(&scenario, &x)?;
            with_output(out, |w| output::write_json(w, &records))
        }
        Command::RiskCurves { format } => {
            let curves = commands::risk_curves(&scenario)?;
            let path = out.or(scenario.output_path.as_deref());
            with_output(path, |w| match format {
                Format::Csv => output::write_curves_csv(w, &curves),
                Format::Json => output::write_json(w, &curves),
            })
        }
        Command::BoundsTable { format } => {
            let rows = commands::bounds_table(&scenario)?;
            with_output(out, |w| match format {
                Format::Csv => output::write_bounds_csv(w, &rows),
                Format::Json => output::write_json(w, &rows),
            })
        }
        Command::Presets => unreachable!(),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
