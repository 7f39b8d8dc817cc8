use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lindsim_cli::config::ModelConfig;
use lindsim_cli::error::CliError;
use lindsim_cli::simulate::{simulate, state_csv, RunMode, SimulateOptions};
use lindsim_cli::verify::{rows_to_csv, run_suite, Suite, VerifyOptions};

#[derive(Parser)]
#[command(name = "lindsim", version, about = "Randomized Lindblad dynamics simulator")]
struct Cli {
    /// Worker threads for trajectory sampling (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Dm,
    Traj,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a model and report the observable estimate with its budget.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        time: f64,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        c0: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::Dm)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1000)]
        ntraj: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit a JSON object instead of CSV.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the final density matrix (dm mode only) as CSV.
        #[arg(long)]
        state_out: Option<PathBuf>,
    },
    /// Run a verification suite and write one CSV row per instance.
    Verify {
        #[arg(long)]
        suite: String,
        /// Model to verify; each suite has a bundled default.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        time: f64,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        c0: f64,
        #[arg(long, default_value_t = 20_000)]
        ntraj: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config, time, epsilon, c0, mode, ntraj, seed, json, out, state_out } => {
            let cfg = ModelConfig::load(&config)?;
            let mode = match mode {
                ModeArg::Dm => RunMode::DensityMatrix,
                ModeArg::Traj => RunMode::Trajectories,
            };
            if state_out.is_some() && mode == RunMode::Trajectories {
                return Err(CliError::Invalid("--state-out needs --mode dm".into()));
            }
            let opts = SimulateOptions { time, epsilon, c0, mode, n_traj: ntraj, seed };
            let (record, rho) = simulate(&cfg, &opts)?;
            let text = if json {
                serde_json::to_string_pretty(&record).expect("record serializes") + "\n"
            } else {
                record.to_csv()
            };
            emit(&text, out.as_ref())?;
            if let (Some(path), Some(rho)) = (state_out, rho) {
                emit(&state_csv(&rho), Some(&path))?;
            }
            Ok(())
        }
        Command::Verify { suite, config, time, epsilon, c0, ntraj, seed, out } => {
            let suite: Suite = suite.parse()?;
            let cfg = match config {
                Some(path) => ModelConfig::load(&path)?,
                None => ModelConfig::from_json(suite.default_config())?,
            };
            let opts = VerifyOptions { time, epsilon, c0, seed, n_traj: ntraj };
            let rows = run_suite(suite, &cfg, &opts)?;
            emit(&rows_to_csv(&rows), out.as_ref())?;
            let failed = rows.iter().filter(|r| !r.pass).count();
            if failed > 0 {
                return Err(CliError::Verification(format!("{failed} of {} rows failed", rows.len())));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(3);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
