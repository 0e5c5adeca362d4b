//! The deterministic stub engine speaking GTP on stdin/stdout.

use std::io::{stdin, stdout};

use clap::Parser;
use fdaa_core::go::Color;
use fdaa_engine::{gtp, StubEngine, StubSettings};

#[derive(Parser)]
#[command(version, about = "Deterministic stub analysis engine over GTP")]
struct Args {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Simulation budget per analysis.
    #[arg(long, default_value_t = 20000)]
    simulations: u32,
    /// Color the win rates drift toward (defaults to one picked by the seed).
    #[arg(long)]
    bias: Option<Color>,
    /// Ply after which positions read as balanced.
    #[arg(long)]
    settle_after: Option<u32>,
}

fn main() -> std::io::Result<()> {
    let args = Args::parse();
    let mut engine = StubEngine::new(StubSettings {
        seed: args.seed,
        simulation_setting: args.simulations,
        bias: args.bias,
        settle_after: args.settle_after,
    });
    gtp::serve(&mut engine, stdin().lock(), stdout().lock())
}
