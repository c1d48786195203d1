//! `deltamass` batch front end.

mod manifest;
mod plot;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use deltamass::catalog::{list_builtin_specs, DEFAULT_SEED};

use crate::manifest::{RunManifest, Task};

/// Worker-count override for per-eps parallelism.
pub const WORKERS_ENV: &str = "DELTAMASS_WORKERS";

#[derive(Parser)]
#[command(
    name = "deltamass",
    version,
    about = "Spectra of strings with a concentrated delta'-like mass and their limit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    #[value(name = "csv+svg")]
    CsvSvg,
}

#[derive(Subcommand)]
enum Command {
    /// Run the requested tasks and write reports to the output directory.
    Run {
        /// Problem file, or `builtin:NAME` for a bundled spec.
        #[arg(long)]
        spec: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Comma-separated subset of perturbed, limit, convergence, resolvent.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "perturbed,limit,convergence,resolvent"
        )]
        tasks: Vec<Task>,
        /// Comma-separated, strictly decreasing.
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        /// Number of tracked eigenvalues.
        #[arg(long)]
        n: Option<usize>,
        /// Resolvent probe as `RE,IM`.
        #[arg(long, allow_hyphen_values = true)]
        zeta: Option<String>,
        /// Quadrature nodes per product-space component for the resolvent gap.
        #[arg(long)]
        nodes: Option<usize>,
        /// Hausdorff truncation level.
        #[arg(long)]
        truncation: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv+svg")]
        format: Format,
    },
    /// Print the bundled specs.
    List {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn init_workers() -> Result<(), String> {
    let Ok(v) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))?;
    if n == 0 {
        return Err(format!("{WORKERS_ENV} must be positive"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_workers() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match cli.command {
        Command::List { seed } => {
            for e in list_builtin_specs(seed) {
                println!("{:<22}{}", e.name, e.description);
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            spec,
            out,
            tasks,
            eps,
            n,
            zeta,
            nodes,
            truncation,
            seed,
            format,
        } => {
            let manifest = match RunManifest::build(
                &spec,
                out,
                &tasks,
                eps,
                n,
                zeta.as_deref(),
                nodes,
                truncation,
                seed,
                format,
            ) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(e.exit_code());
                }
            };
            match run::run(&manifest) {
                Ok(summary) => {
                    println!("{}", summary.headline());
                    ExitCode::from(if summary.all_hard_pass { 0 } else { 1 })
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code())
                }
            }
        }
    }
}
