use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use qsir_cli::{parse_config_with, run, CliError, Mode, Overrides};

/// Quantum-grid SIR model: recurrence and closed-form trajectories, an RK4
/// continuous-time reference, cross-model comparison, limit analysis, and
/// grid-ratio sweeps.
#[derive(Parser)]
#[command(name = "qsir", version)]
struct Cli {
    /// What to run
    #[arg(value_enum)]
    mode: Mode,

    /// Flat key=value run description
    #[arg(long)]
    config: PathBuf,

    /// Overrides out_csv from the config
    #[arg(long)]
    out_csv: Option<PathBuf>,

    /// Overrides out_svg from the config
    #[arg(long)]
    out_svg: Option<PathBuf>,

    /// Overrides n_steps from the config
    #[arg(long)]
    steps: Option<u64>,

    /// Indices inspected by the analyze diagnostics
    #[arg(long)]
    horizon: Option<u64>,

    /// Relative tolerance for alpha convergence
    #[arg(long)]
    tol: Option<f64>,
}

fn try_main(cli: Cli) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&cli.config).map_err(|e| CliError::Io {
        path: cli.config.clone(),
        source: e,
    })?;
    let over = Overrides {
        mode: Some(cli.mode),
        n_steps: cli.steps,
        out_csv: cli.out_csv,
        out_svg: cli.out_svg,
        horizon: cli.horizon,
        tol: cli.tol,
    };
    let cfg = parse_config_with(&text, &over)?;
    let report = run(&cfg)?;
    for warning in &report.warnings {
        eprintln!("qsir: warning: {warning}");
    }
    for line in &report.lines {
        println!("{line}");
    }
    Ok(())
}

fn main() -> ExitCode {
    match try_main(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qsir: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
