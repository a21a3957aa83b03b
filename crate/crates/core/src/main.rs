use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use collapse_lab::cli_io::{self, exit_code, LoadedModel, EXIT_AUDIT, EXIT_OK};
use collapse_lab::Result;

#[derive(Parser)]
#[command(name = "collapse-lab", version, about = "Collapse experiments on finite spectral triples")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a model and print its summary.
    Build {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep ε and write track and summary CSVs.
    Sweep {
        #[arg(long)]
        model: PathBuf,
        /// Comma list or geometric:start:ratio:count
        #[arg(long)]
        eps_grid: Option<String>,
        #[arg(long)]
        window: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Spectrum of D_ε at one ε.
    Spectrum {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Connes distances between states.
    Distance {
        #[arg(long)]
        model: PathBuf,
        /// i:j pairs, @density.json sides, or haar:N
        #[arg(long)]
        states: String,
        /// Brute-force oracle (at most four real parameters).
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized hypothesis audit; exits 5 if any hypothesis fails.
    Audit {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep, audit and optional distances in one JSON bundle.
    Report {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        eps_grid: Option<String>,
        #[arg(long)]
        window: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        states: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => cli_io::write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn grid(s: &Option<String>) -> Result<Option<Vec<f64>>> {
    s.as_deref().map(cli_io::parse_eps_grid).transpose()
}

fn seed_of(loaded: &LoadedModel, seed: Option<u64>) -> u64 {
    seed.unwrap_or(loaded.spec.seed)
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Build { model, out } => {
            let loaded = cli_io::load_model(&model)?;
            emit(out.as_deref(), &cli_io::to_json(&cli_io::build_summary(&loaded)?))?;
        }
        Cmd::Sweep { model, eps_grid, window, out } => {
            cli_io::cmd_sweep(&model, grid(&eps_grid)?.as_deref(), window, &out)?;
        }
        Cmd::Spectrum { model, eps, out } => {
            emit(out.as_deref(), &cli_io::cmd_spectrum(&model, eps)?)?;
        }
        Cmd::Distance { model, states, oracle, seed, out } => {
            let loaded = cli_io::load_model(&model)?;
            let rows = cli_io::run_distances(&loaded, &states, oracle, seed_of(&loaded, seed))?;
            emit(out.as_deref(), &cli_io::distance_csv(&rows))?;
        }
        Cmd::Audit { model, samples, seed, out } => {
            let loaded = cli_io::load_model(&model)?;
            let report = cli_io::run_audit(&loaded, samples, seed_of(&loaded, seed))?;
            emit(out.as_deref(), &cli_io::to_json(&report))?;
            if !report.all_pass {
                eprintln!("audit failed: hypotheses {:?}", report.failed());
                return Ok(EXIT_AUDIT);
            }
        }
        Cmd::Report { model, eps_grid, window, samples, seed, states, out } => {
            let loaded = cli_io::load_model(&model)?;
            let seed = seed_of(&loaded, seed);
            let sweep = cli_io::run_sweep(&loaded, grid(&eps_grid)?.as_deref(), window)?;
            let audit = cli_io::run_audit(&loaded, samples, seed)?;
            let distances = states.as_deref().map(|s| cli_io::run_distances(&loaded, s, false, seed)).transpose()?;
            let bundle = cli_io::report_bundle(&loaded, &sweep, &audit, distances.as_deref(), seed);
            cli_io::write_atomic(&out, cli_io::to_json(&bundle).as_bytes())?;
            if !audit.all_pass {
                eprintln!("audit failed: hypotheses {:?}", audit.failed());
                return Ok(EXIT_AUDIT);
            }
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("COLLAPSE_LAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
    }
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
