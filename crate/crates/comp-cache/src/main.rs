//! `comp-cache`: figure reproduction and point evaluation for the
//! cluster-centric cooperative caching model.

use clap::{Parser, Subcommand};
use comp_cache::config::{load_config, SystemConfig};
use comp_cache::experiment::{run_figure, run_point, FIGURES, METRICS};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "comp-cache",
    about = "Cluster-centric cache-enabled small-cell network experiments",
    long_about = None
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce one figure recipe as a CSV file.
    Figure {
        /// Recipe name.
        #[arg(value_parser = FIGURES.to_vec())]
        name: String,
        /// Flat key-value config file; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the simulator realization count.
        #[arg(long)]
        realizations: Option<u64>,
    },
    /// Evaluate one metric at one parameter point; prints JSON on stdout.
    Point {
        /// Metric name.
        #[arg(long, value_parser = METRICS.to_vec())]
        metric: String,
        /// Flat key-value config file; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// key=value overrides: config keys or rho, K, scheme, theta,
        /// ratio, rate.
        #[arg(long = "set")]
        set: Vec<String>,
    },
}

fn base_config(path: &Option<PathBuf>) -> comp_cache::Result<SystemConfig> {
    match path {
        Some(p) => load_config(p),
        None => {
            let c = SystemConfig::default();
            c.validate()?;
            Ok(c)
        }
    }
}

fn run(cli: Cli) -> comp_cache::Result<()> {
    match cli.command {
        Command::Figure {
            name,
            config,
            out,
            seed,
            realizations,
        } => {
            let mut cfg = base_config(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(n) = realizations {
                cfg.n_realizations = n;
            }
            cfg.validate()?;
            eprint!("{}", cfg.validation_report());
            let mut buf = Vec::new();
            run_figure(&name, &cfg, &mut buf)?;
            std::fs::write(&out, buf)?;
            eprintln!("wrote {}", out.display());
            Ok(())
        }
        Command::Point {
            metric,
            config,
            set,
        } => {
            let cfg = base_config(&config)?;
            let record = run_point(&cfg, &metric, &set)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&record).expect("record serializes")
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
