use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sourceq_cli::bounds_table::{bounds_csv, BoundsQuery};
use sourceq_cli::config::{parse_list, ExperimentConfig, RepetitionPolicy, Scheme, TopologySpec};
use sourceq_cli::csv::write_csv;
use sourceq_cli::error::Result;
use sourceq_cli::harness::run_experiment;

/// Diffusion-source detection experiments and budget bound tables.
#[derive(Parser)]
#[command(name = "sourceq", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run Monte Carlo detection trials and emit a CSV table.
    Simulate {
        /// tree:d=3 | er:n=2000,deg=4 | sf:n=2000,ratio=1.5 | file:PATH
        #[arg(long, default_value = "tree:d=3")]
        topology: String,
        /// na (batch), ad (adaptive walk), or rc (no-query baseline)
        #[arg(long, default_value = "na")]
        scheme: String,
        #[arg(long = "n-infected", default_value_t = 400)]
        n_infected: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Comma-separated budget grid
        #[arg(long = "K", default_value = "25,50,100,200,400")]
        budgets: String,
        /// Repetitions per respondent: an integer or "auto"
        #[arg(long, default_value = "auto")]
        r: String,
        #[arg(long, default_value_t = 0.667)]
        p: f64,
        #[arg(long, default_value_t = 0.667)]
        q: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the budget bounds and adaptivity-gap envelope as CSV.
    Bounds {
        /// Comma-separated target error levels
        #[arg(long, default_value = "0.1")]
        delta: String,
        #[arg(long, default_value_t = 0.75)]
        p: f64,
        #[arg(long, default_value_t = 0.6)]
        q: f64,
        #[arg(long, default_value_t = 3)]
        d: usize,
        /// Degree-dependent constant of the lower bounds
        #[arg(long = "c-d", default_value_t = 1.0)]
        c_d: f64,
        /// Infection-time entropy surrogate
        #[arg(long = "h-t", default_value_t = 1.0)]
        h_t: f64,
        #[arg(long, default_value_t = 1.0)]
        u1: f64,
        #[arg(long, default_value_t = 1.0)]
        u2: f64,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &[u8], out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text)?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            topology,
            scheme,
            n_infected,
            trials,
            budgets,
            r,
            p,
            q,
            seed,
            out,
        } => {
            let config = ExperimentConfig {
                topology: TopologySpec::parse(&topology)?,
                scheme: Scheme::parse(&scheme)?,
                n_infected,
                trials,
                budgets: parse_list(&budgets, "budget")?,
                repetition: RepetitionPolicy::parse(&r)?,
                p,
                q,
                base_seed: seed,
            };
            let rows = run_experiment(&config)?;
            let mut buffer = Vec::new();
            write_csv(&rows, &mut buffer)?;
            emit(&buffer, out.as_ref())
        }
        Command::Bounds {
            delta,
            p,
            q,
            d,
            c_d,
            h_t,
            u1,
            u2,
            out,
        } => {
            let deltas = parse_list::<f64>(&delta, "delta")?;
            let query = BoundsQuery {
                p,
                q,
                d,
                c_d,
                h_t,
                u1,
                u2,
            };
            let table = bounds_csv(&deltas, &query)?;
            emit(table.as_bytes(), out.as_ref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code())
        }
    }
}
