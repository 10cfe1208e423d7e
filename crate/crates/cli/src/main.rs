mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};

use commands::{Outcome, SimulateArgs, Status};
use resistnet_core::experiment::{DEFAULT_NODES, DEFAULT_RADIUS, DEFAULT_SEED};

/// Stability, robustness and simulation of signed consensus networks.
#[derive(Parser)]
#[command(name = "resistnet", version)]
struct Cli {
    /// Relative zero threshold for eigenvalues.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify stability and report diagnostics for a graph file.
    Analyze { graph: PathBuf },
    /// Robustness margin for a set of uncertain edges.
    Margin {
        graph: PathBuf,
        /// all, single:<k> or set:<k1,k2,...>
        #[arg(long, default_value = "all")]
        edges: String,
        /// Uniform sector a,b applied to every uncertain edge.
        #[arg(long, allow_hyphen_values = true)]
        sector: Option<String>,
    },
    /// Integrate the linear or nonlinear consensus dynamics.
    Simulate {
        graph: PathBuf,
        /// Weight perturbation k=delta (repeatable).
        #[arg(long, allow_hyphen_values = true)]
        perturb: Vec<String>,
        /// Nonlinear coupling k=a,b,c (repeatable).
        #[arg(long, allow_hyphen_values = true)]
        nonlinear: Vec<String>,
        /// Horizon.
        #[arg(long = "T")]
        t: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        /// Comma list or random:<seed>.
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<String>,
        /// Trajectory CSV path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random geometric graph study: binding edge, margin and runs.
    #[command(name = "repro-sec6")]
    ReproSec6 {
        #[arg(long, default_value_t = DEFAULT_NODES)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_RADIUS)]
        radius: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value = "repro-out")]
        out: PathBuf,
    },
}

fn run(cli: &Cli) -> Result<Outcome> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        bail!("--tol must be positive and finite");
    }
    match &cli.command {
        Command::Analyze { graph } => commands::analyze(graph, cli.tol),
        Command::Margin { graph, edges, sector } => commands::margin(graph, edges, sector.as_deref(), cli.tol),
        Command::Simulate { graph, perturb, nonlinear, t, dt, x0, out } => commands::simulate(
            &SimulateArgs {
                graph,
                perturb,
                nonlinear,
                duration: *t,
                dt: *dt,
                x0: x0.as_deref(),
                out: out.as_deref(),
            },
            cli.tol,
        ),
        Command::ReproSec6 { n, radius, seed, out } => commands::repro(*n, *radius, *seed, out, cli.tol),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("{w}");
            }
            let text = if cli.json { report::to_json(&outcome.doc) } else { report::to_text(&outcome.doc) };
            print!("{text}");
            match outcome.status {
                Status::Success => ExitCode::SUCCESS,
                Status::Analytic => ExitCode::from(2),
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
