//! `ricci`: sample point clouds on embedded manifolds, evaluate the kernel
//! operator stack on them, sweep convergence experiments, and query the
//! concentration-bound calculators.
//!
//! Every command is deterministic given its full argument list; pass
//! `--no-timestamp` to make the output bytes reproducible as well. The
//! worker count is capped by the `RICCI_THREADS` environment variable
//! (0 or unset picks the machine default); thread count never changes
//! output bytes. Exit codes: 0 success, 2 usage or parameter errors,
//! 3 file errors, 4 numerical breakdown.

mod bandwidth;
mod cmd_bounds;
mod cmd_converge;
mod cmd_estimate;
mod cmd_net;
mod cmd_ricci;
mod cmd_sample;
mod config;
mod errors;
mod fields;
mod output;

use clap::{Parser, Subcommand};

use errors::CliResult;

#[derive(Parser)]
#[command(
    name = "ricci",
    version,
    about = "Kernel curvature estimators on sampled manifolds",
    long_about = "Gaussian-kernel estimators of the carre du champ, its iterate, and \
coarse Ricci curvature on point clouds sampled from embedded manifolds, with \
deterministic experiment sweeps and concentration-bound calculators.\n\n\
All subcommands accept --config PATH with flat key=value lines; explicit \
flags win over config values."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a cloud (or build a quadrature grid) and write it as CSV
    Sample(cmd_sample::SampleArgs),
    /// Evaluate kernel operators on a stored cloud at query points
    Estimate(cmd_estimate::EstimateArgs),
    /// Coarse Ricci curvature: one pair, or a limit sweep along a geodesic
    Ricci(cmd_ricci::RicciArgs),
    /// Error sweep over sample sizes and seeds against a reference
    Converge(cmd_converge::ConvergeArgs),
    /// Deviation-probability calculators and their inversion
    Bounds(cmd_bounds::BoundsArgs),
    /// Greedy epsilon-net over a stored cloud, with verification
    Net(cmd_net::NetArgs),
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();

    let argv: Vec<String> = std::env::args().collect();
    let argv = match config::inject_config(argv) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    };
    let cli = Cli::parse_from(argv);

    if let Err(e) = init_thread_pool() {
        eprintln!("error: {e}");
        std::process::exit(2);
    }

    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Sample(args) => cmd_sample::run(args),
        Command::Estimate(args) => cmd_estimate::run(args),
        Command::Ricci(args) => cmd_ricci::run(args),
        Command::Converge(args) => cmd_converge::run(args),
        Command::Bounds(args) => cmd_bounds::run(args),
        Command::Net(args) => cmd_net::run(args),
    }
}

/// Apply the RICCI_THREADS cap before any parallel work starts. Zero or
/// unset keeps rayon's default.
fn init_thread_pool() -> Result<(), String> {
    let Ok(raw) = std::env::var("RICCI_THREADS") else {
        return Ok(());
    };
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(());
    }
    let k: usize = raw
        .parse()
        .map_err(|_| format!("RICCI_THREADS must be a nonnegative integer, got {raw:?}"))?;
    if k == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(k)
        .build_global()
        .map_err(|e| format!("thread pool init failed: {e}"))
}
