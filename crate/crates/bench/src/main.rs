use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wigtomo_bench::commands::{write_csv, write_json};
use wigtomo_bench::{BenchError, RunConfig};

#[derive(Parser)]
#[command(
    name = "wigtomo-bench",
    version,
    about = "Seeded Wigner tomography benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Shots to reach the target fidelity against mode count.
    Scaling,
    /// Fidelity and distance against shots.
    Convergence,
    /// Raw DEMESST trace against shots.
    TraceCheck,
    /// Direct fidelity estimation against the W target.
    W2,
    /// One reconstruction, written as JSON.
    Reconstruct,
    /// Optimize and write the OLI displacement set.
    OptimizeSet,
}

fn run(cli: &Cli) -> Result<bool, BenchError> {
    let mut config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    config.validate()?;
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| BenchError::Config(e.to_string()))?;
    }
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| BenchError::Config(format!("{}: {e}", cli.out.display())))?;
    let out = |name: &str| -> PathBuf { Path::new(&cli.out).join(name) };
    let mut flagged = false;
    match cli.command {
        Command::Scaling => {
            let rows = wigtomo_bench::scaling(&config)?;
            flagged = rows.iter().any(|r| r.flagged);
            write_csv(&out("scaling.csv"), &rows)?;
        }
        Command::Convergence => {
            let c = wigtomo_bench::convergence(&config)?;
            write_csv(&out("convergence.csv"), &c.rows)?;
            write_csv(&out("convergence_fit.csv"), &c.fits)?;
        }
        Command::TraceCheck => write_csv(&out("trace.csv"), &wigtomo_bench::trace_check(&config)?)?,
        Command::W2 => {
            let r = wigtomo_bench::w2(&config)?;
            write_csv(&out("w2.csv"), &r.rows)?;
            write_json(&out("w2_summary.json"), &r.summary)?;
        }
        Command::Reconstruct => {
            let (summary, report) = wigtomo_bench::reconstruct(&config)?;
            write_json(&out("reconstruct_summary.json"), &summary)?;
            std::fs::write(
                out("reconstruct.json"),
                report.to_json().map_err(BenchError::Core)? + "\n",
            )?;
        }
        Command::OptimizeSet => write_json(
            &out("optimize_set.json"),
            &wigtomo_bench::optimize_set(&config)?,
        )?,
    }
    Ok(flagged)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("budget cap reached before the target fidelity; see the flagged rows");
            ExitCode::from(3)
        }
        Err(e @ BenchError::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
