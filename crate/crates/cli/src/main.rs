use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mechprep::{PositionGrid, TargetSpec};

mod budget;
mod figure;
mod output;
mod plots;
mod prep;
mod synth;

#[derive(Parser)]
#[command(name = "mechprep", version, about = "Shaped-pulse position measurements and conditional state preparation")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, serde::Serialize)]
pub struct Global {
    /// Synthesis grid as `xmax,n` (symmetric about 0).
    #[arg(long, global = true, value_parser = parse_grid)]
    pub grid: Option<PositionGrid>,
    /// Fock truncation of the resonator state.
    #[arg(long, global = true, default_value_t = mechprep::engine::DEFAULT_N_MAX)]
    pub nmax: usize,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
    /// Reserved; every pipeline is deterministic.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Global {
    pub fn synth_grid(&self) -> PositionGrid {
        self.grid.unwrap_or_default()
    }
}

#[derive(Subcommand)]
enum Command {
    /// Design a pulse for a target operator and realize it.
    Synthesize(synth::SynthesizeArgs),
    /// Realize the operator of an existing pulse.
    Realize(synth::RealizeArgs),
    /// Run the conditional preparation protocol, or sweep its squeezing.
    Protocol(prep::ProtocolArgs),
    /// Write the data behind a figure panel with a plot script.
    Figure(figure::FigureArgs),
    /// Coherence budget in lab units; `--selfcheck` adds the oracle reports.
    Budget(budget::BudgetArgs),
    /// Run the validation oracles and write their reports.
    Selfcheck,
}

#[derive(Clone, Copy, Debug, ValueEnum, serde::Serialize)]
pub enum StepsArg {
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
}

fn parse_grid(s: &str) -> Result<PositionGrid, String> {
    let (x, n) = s.split_once(',').ok_or("expected xmax,n")?;
    let x: f64 = x.trim().parse().map_err(|_| format!("bad xmax '{x}'"))?;
    let n: usize = n.trim().parse().map_err(|_| format!("bad point count '{n}'"))?;
    PositionGrid::new(x, n).map_err(|e| e.to_string())
}

pub fn parse_target(s: &str) -> Result<TargetSpec, String> {
    s.parse().map_err(|e: mechprep::Error| e.to_string())
}

/// Comma-separated numbers; an alias so clap takes the list as one value.
pub type FloatList = Vec<f64>;

pub fn parse_list(s: &str) -> Result<FloatList, String> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("bad number '{v}'")))
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let g = &cli.global;
    let result = match &cli.command {
        Command::Synthesize(a) => synth::synthesize(g, a),
        Command::Realize(a) => synth::realize(g, a),
        Command::Protocol(a) => prep::protocol(g, a),
        Command::Figure(a) => figure::figure(g, a),
        Command::Budget(a) => budget::budget(g, a),
        Command::Selfcheck => budget::selfcheck(g),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
