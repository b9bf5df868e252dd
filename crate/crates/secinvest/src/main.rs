use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use secinvest::experiments;
use secinvest::output::{resolve_output_dir, write_run};
use secinvest::sweep::{parse_values, run_sweep, SweepParam};
use secinvest::{AppError, ExperimentConfig};

/// Degree-contingent security investment equilibria.
#[derive(Parser)]
#[command(name = "secinvest", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run(Common),
    /// Run one experiment per value of a parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// lambda, c0, r_target or resolution.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Check a config file without computing anything.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Defaults to the config's output_dir, then $SECINVEST_OUTPUT_DIR.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Overrides the config's root seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, AppError> {
        let text = std::fs::read_to_string(&self.config)
            .map_err(|e| AppError::Io(format!("cannot read {}: {e}", self.config.display())))?;
        let mut cfg = ExperimentConfig::from_toml(&text)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
            cfg.validate()?;
        }
        Ok(cfg)
    }

    fn init(&self) -> Result<(), AppError> {
        let level = match self.verbose {
            0 => "warn",
            1 => "info",
            2 => "debug",
            _ => "trace",
        };
        let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
        if let Some(n) = self.workers {
            if n == 0 {
                return Err(AppError::Validation("--workers must be at least 1".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| AppError::Validation(format!("--workers: {e}")))?;
        }
        Ok(())
    }
}

fn execute(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Validate(common) => {
            common.init()?;
            let cfg = common.load()?;
            println!("{}: ok ({})", common.config.display(), cfg.experiment.as_str());
        }
        Command::Run(common) => {
            common.init()?;
            let cfg = common.load()?;
            let dir = resolve_output_dir(common.output_dir.clone(), &cfg);
            log::info!("running {} with seed {}", cfg.experiment.as_str(), cfg.seed);
            let out = experiments::run(&cfg)?;
            write_run(&dir, &cfg, &out)?;
            print!("{}", out.summary);
            println!("results in {}", dir.display());
        }
        Command::Sweep { common, param, values } => {
            common.init()?;
            let cfg = common.load()?;
            let param: SweepParam = param.parse()?;
            let values = parse_values(&values)?;
            let dir = resolve_output_dir(common.output_dir.clone(), &cfg);
            let outs = run_sweep(&cfg, param, &values, &dir)?;
            println!("sweep over {}: {} runs, combined table {}", param.as_str(), outs.len(), dir.join("sweep.csv").display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
