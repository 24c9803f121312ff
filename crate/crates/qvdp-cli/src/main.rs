use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qvdp_cli::config::{parse_config, OutputFormat};
use qvdp_cli::figures::{figure_preset, FigureName};
use qvdp_cli::sweep::run_config;
use qvdp_cli::OUT_DIR_ENV;

/// Steady-state response, susceptibility, noise, and Wigner datasets of a
/// resonantly driven quantum van der Pol oscillator.
#[derive(Parser)]
#[command(name = "qvdp", version, about)]
struct Cli {
    /// Worker threads for sweep points (0 = all cores). Numeric output is
    /// independent of this setting.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    /// Abort on the first failing sweep point instead of recording it.
    #[arg(long, global = true)]
    strict: bool,

    /// Override the configured output format.
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a drive or rate sweep from a JSON configuration file.
    Sweep { config: PathBuf },
    /// Emit the datasets of a named figure preset.
    Figure {
        /// One of: fig1 fig2 fig3 fig4 fig5 figS1 figS2 figS4 figS5
        name: String,
        /// Output directory (default: $QVDP_OUT_DIR or the working directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Full-resolution grids for the map presets (figS5: 61x61).
        #[arg(long)]
        full: bool,
    },
    /// Sample the Wigner function of one steady state (JSON configuration).
    Wigner { config: PathBuf },
    /// Evaluate the closed-form classical response curve (JSON configuration).
    Classical { config: PathBuf },
}

fn out_dir(explicit: Option<PathBuf>) -> PathBuf {
    explicit
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn run_from_config(
    path: &PathBuf,
    cli: &Cli,
    expect_mode: Option<&[qvdp_cli::Mode]>,
) -> Result<qvdp_cli::sweep::RunOutcome, ExitCode> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(2)
    })?;
    let mut cfg = parse_config(&text).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })?;
    if let Some(modes) = expect_mode {
        if !modes.contains(&cfg.mode) {
            eprintln!(
                "error: invalid mode: config has mode {:?}, not valid for this subcommand",
                cfg.mode.as_str()
            );
            return Err(ExitCode::from(2));
        }
    }
    if cli.workers > 0 {
        cfg.workers = cli.workers;
    }
    if cli.strict {
        cfg.strict = true;
    }
    if let Some(f) = &cli.format {
        cfg.format = if f == "json" {
            OutputFormat::Json
        } else {
            OutputFormat::Csv
        };
        let stem = cfg.output.clone();
        let stem = stem.trim_end_matches(".csv").trim_end_matches(".json");
        cfg.output = format!("{stem}.{}", cfg.format.extension());
    }
    run_config(&cfg, &out_dir(None)).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })
}

fn report(outcome: qvdp_cli::sweep::RunOutcome) -> ExitCode {
    for f in &outcome.files {
        println!("{}", f.display());
    }
    if outcome.point_failures > 0 {
        eprintln!("warning: {} point(s) failed; see the error column", outcome.point_failures);
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match &cli.command {
        Command::Sweep { config } => {
            match run_from_config(
                config,
                &cli,
                Some(&[qvdp_cli::Mode::DriveSweep, qvdp_cli::Mode::RateSweep]),
            ) {
                Ok(outcome) => report(outcome),
                Err(code) => code,
            }
        }
        Command::Wigner { config } => {
            match run_from_config(config, &cli, Some(&[qvdp_cli::Mode::Wigner])) {
                Ok(outcome) => report(outcome),
                Err(code) => code,
            }
        }
        Command::Classical { config } => {
            match run_from_config(config, &cli, Some(&[qvdp_cli::Mode::Classical])) {
                Ok(outcome) => report(outcome),
                Err(code) => code,
            }
        }
        Command::Figure { name, out, full } => {
            let name: FigureName = match name.parse() {
                Ok(n) => n,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            match figure_preset(name, &out_dir(out.clone()), cli.workers, *full) {
                Ok(outcome) => report(outcome),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
