use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use cuttail_cli::job::PlotRequest;
use cuttail_cli::output::write_reports;
use cuttail_cli::plot::PlotKind;
use cuttail_cli::{run, CliError, Command, InputSource, JobConfig, OutputFormat, Tolerances};

/// Cut-tail points of Hurwitz matrices.
///
/// Exit codes: 0 on success, 2 when the input is not Hurwitz, 1 for any
/// other failure (bad arguments, parse errors, numeric failures).
#[derive(Parser)]
#[command(name = "cuttail", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Compute T_cut by exchange plus bisection.
    CutTail(Common),
    /// Solve the minimax problem at a single T.
    Extremal {
        /// End of the time interval [0, T].
        #[arg(long = "t")]
        t: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Compare exchange, closed-form and geometric T_cut on a 2D system.
    Verify2d(Common),
    /// Search for slowly decaying switching laws, with and without the T_cut cap.
    Simulate {
        /// Minimal dwell time per mode.
        #[arg(long, default_value_t = 0.1)]
        dwell_min: f64,
        /// Greedy restarts per search.
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run cut-tail on many inputs concurrently.
    Sweep {
        /// Worker threads (defaults to available parallelism).
        #[arg(long)]
        threads: Option<usize>,
        /// Add every bundled example to the batch.
        #[arg(long)]
        catalog: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    JsonLines,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Matrix file (plain "d" + rows, or {"matrix": [[...]]}).
    #[arg(long)]
    matrix: Vec<PathBuf>,
    /// Spectrum such as "-0.3:2, -0.8+0.9i".
    #[arg(long, allow_hyphen_values = true)]
    spectrum: Vec<String>,
    /// Bundled example by name (diagonal-pair, damped-rotation, ...).
    #[arg(long)]
    example: Vec<String>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    time_tol: Option<f64>,
    #[arg(long)]
    value_tol: Option<f64>,
    /// Trajectory samples for geometric checks and plots.
    #[arg(long)]
    samples: Option<usize>,
    /// Trajectory horizon for geometric checks, plots and switching searches.
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json-lines")]
    format: Format,
    /// Directory for CSV and SVG plot files.
    #[arg(long)]
    plot: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    plot_kind: PlotKind,
    /// Omit wall-clock times so output is reproducible byte for byte.
    #[arg(long)]
    no_timestamps: bool,
}

impl Common {
    fn into_config(self, command: Command, extra: Vec<InputSource>) -> JobConfig {
        let defaults = Tolerances::default();
        let mut inputs: Vec<InputSource> = self.matrix.into_iter().map(InputSource::MatrixFile).collect();
        inputs.extend(self.spectrum.into_iter().map(InputSource::Spectrum));
        inputs.extend(self.example.into_iter().map(InputSource::Example));
        inputs.extend(extra);
        JobConfig {
            command,
            inputs,
            tolerances: Tolerances {
                eps: self.eps.unwrap_or(defaults.eps),
                time_tol: self.time_tol.unwrap_or(defaults.time_tol),
                value_tol: self.value_tol.unwrap_or(defaults.value_tol),
            },
            format: match self.format {
                Format::JsonLines => OutputFormat::JsonLines,
                Format::Csv => OutputFormat::Csv,
            },
            seed: self.seed,
            samples: self.samples,
            horizon: self.horizon,
            plot: self.plot.map(|dir| PlotRequest { dir, kind: self.plot_kind }),
            timestamps: !self.no_timestamps,
        }
    }
}

fn config(cli: Cli) -> JobConfig {
    match cli.command {
        Sub::CutTail(c) => c.into_config(Command::CutTail, vec![]),
        Sub::Extremal { t, common } => common.into_config(Command::Extremal { t }, vec![]),
        Sub::Verify2d(c) => c.into_config(Command::Verify2d, vec![]),
        Sub::Simulate { dwell_min, restarts, common } => {
            common.into_config(Command::Simulate { dwell_min, restarts }, vec![])
        }
        Sub::Sweep { threads, catalog, common } => {
            let threads = threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let extra = if catalog {
                cuttail::catalog::all().into_iter().map(|(n, _)| InputSource::Example(n.to_string())).collect()
            } else {
                Vec::new()
            };
            common.into_config(Command::Sweep { threads }, extra)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            return ExitCode::from(if ok { 0 } else { 1 });
        }
    };
    let cfg = config(cli);
    let result = run(&cfg).and_then(|outcome| {
        write_reports(&mut std::io::stdout().lock(), &outcome.reports, cfg.format)?;
        Ok::<_, CliError>(outcome.exit_code)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
