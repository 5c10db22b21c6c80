use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qevolve::config::ExperimentConfig;
use qevolve::runner::{run_config, run_sweep, Mode};
use qevolve::Error;

#[derive(Parser)]
#[command(
    name = "qevolve",
    version,
    about = "Variational time stepping for diffusion, reaction-diffusion and cavity flow"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write solutions.csv, metrics.csv and summary.txt.
    Run {
        #[command(flatten)]
        common: Common,
        /// Run only the classical twin.
        #[arg(long, conflicts_with = "verify")]
        oracle_only: bool,
        /// Run both and fill the trace-error column.
        #[arg(long)]
        verify: bool,
    },
    /// Expand list-valued keys and repeat each point `runs` times.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (TOML).
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<(ExperimentConfig, PathBuf), Error> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        let dir = self
            .output_dir
            .clone()
            .or_else(|| cfg.output.clone())
            .unwrap_or_else(|| PathBuf::from("output"));
        Ok((cfg, dir))
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run {
            common,
            oracle_only,
            verify,
        } => {
            let (cfg, dir) = common.load()?;
            let mode = if oracle_only {
                Mode::OracleOnly
            } else if verify {
                Mode::Verify
            } else {
                Mode::Quantum
            };
            let report = run_config(&cfg, mode)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            report.write(&dir)?;
            println!("{}", report.summary_line());
        }
        Command::Sweep { common } => {
            let (cfg, dir) = common.load()?;
            let sweep = run_sweep(&cfg)?;
            for w in &sweep.warnings {
                eprintln!("warning: {w}");
            }
            sweep.write(&dir)?;
            print!("{}", sweep.stats_csv());
            println!("{}", sweep.summary_line());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
