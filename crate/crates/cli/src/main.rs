//! `modvar` binary: run, dump-state, verify, and grid-info subcommands.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use modvar_cli::commands::{cmd_dump_state, cmd_grid_info, cmd_run, cmd_verify, init_workers, RunArgs};

#[derive(Parser)]
#[command(name = "modvar", about = "Modular-variable simulator and gate compiler")]
struct Cli {
    /// Worker threads for dense kernels; 1 (the default) is bit-stable.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute the configured circuit and write metrics.
    Run(ConfigArgs),
    /// Execute the configured circuit and dump each outcome state.
    DumpState(ConfigArgs),
    /// Run a named self-check suite.
    Verify(VerifyArgs),
    /// Print the derived grid quantities for a config.
    GridInfo(GridArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Path to the JSON run config.
    #[arg(long)]
    config: PathBuf,
    /// Seed override; takes precedence over the config value.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for artifacts (default: current directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name: zak, povm, circuit11, circuit13, backends, or all.
    #[arg(long)]
    suite: String,
    /// Seed for the suite's random draws.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct GridArgs {
    /// Path to the JSON run config.
    #[arg(long)]
    config: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    init_workers(cli.workers);
    let result = match &cli.cmd {
        Cmd::Run(a) => cmd_run(&RunArgs {
            config: a.config.clone(),
            seed: a.seed,
            out: a.out.clone(),
        }),
        Cmd::DumpState(a) => cmd_dump_state(&RunArgs {
            config: a.config.clone(),
            seed: a.seed,
            out: a.out.clone(),
        }),
        Cmd::Verify(a) => cmd_verify(&a.suite, a.seed.unwrap_or(0)),
        Cmd::GridInfo(a) => cmd_grid_info(&a.config),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
