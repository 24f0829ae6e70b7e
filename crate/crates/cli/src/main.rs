use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod demo;
mod output;

use output::Style;

/// Verify, synthesize, evaluate and search nonbossy mechanisms.
#[derive(Parser, Debug)]
#[command(name = "nonbossy", version, about)]
pub struct Cli {
    /// Worker threads for checkers and searches (default: all cores).
    #[arg(long, global = true, env = "NONBOSSY_THREADS")]
    threads: Option<usize>,

    /// Show metrics as 6-digit decimals instead of exact fractions.
    #[arg(long, global = true)]
    decimal: bool,

    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run property checkers on a mechanism file.
    Check(CheckArgs),
    /// Synthesize an order-oblivious decision list from a mechanism.
    Synth(SynthArgs),
    /// Turn a single-item decision list into a posted-price plan.
    Extract(ExtractArgs),
    /// Exact expected welfare and revenue under a prior.
    Eval(EvalArgs),
    /// Search for an optimal mechanism within a class.
    Search(SearchArgs),
    /// Run a named fixture end to end.
    Demo(DemoArgs),
    /// Fixture utilities.
    #[command(subcommand)]
    Fixture(FixtureCommand),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PropertyArg {
    Ic,
    Ir,
    Nb,
    Pc,
    Cons,
    Osp,
    Sl,
    Gs,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    pub mechanism: PathBuf,
    #[arg(long)]
    pub env: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [PropertyArg::Ic, PropertyArg::Ir, PropertyArg::Nb, PropertyArg::Pc])]
    pub properties: Vec<PropertyArg>,
    /// Visit order for the OSP check (default: the plan's own order, else index order).
    #[arg(long, value_delimiter = ',')]
    pub order: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    pub mechanism: PathBuf,
    #[arg(long)]
    pub env: Option<PathBuf>,
    /// Largest outcome image synthesis will attempt.
    #[arg(long, default_value_t = nonbossy::synth::DEFAULT_IMAGE_BOUND)]
    pub image_bound: usize,
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    pub list: PathBuf,
    #[arg(long)]
    pub env: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    pub mechanism: PathBuf,
    #[arg(long)]
    pub prior: PathBuf,
    #[arg(long)]
    pub env: Option<PathBuf>,
    /// Estimate by sampling instead of exact enumeration.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Include the per-profile breakdown.
    #[arg(long)]
    pub detailed: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    PostedPrice,
    DecisionList,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Revenue,
    Welfare,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long, value_enum)]
    pub class: ClassArg,
    #[arg(long, value_enum, default_value = "revenue")]
    pub objective: ObjectiveArg,
    #[arg(long)]
    pub prior: PathBuf,
    /// Environment supplying the feasible set (default: every allocation feasible).
    #[arg(long)]
    pub env: Option<PathBuf>,
    /// Candidate prices for every agent (default: union of the prior's atoms).
    #[arg(long, value_delimiter = ',')]
    pub prices: Option<Vec<String>>,
    #[arg(long)]
    pub max_agents: Option<usize>,
    #[arg(long)]
    pub max_atoms: Option<usize>,
    #[arg(long)]
    pub max_outcomes: Option<usize>,
    #[arg(long)]
    pub max_candidates: Option<u128>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FixtureName {
    Prop2,
    Example4,
    Correlated,
    Partition,
    Spa,
    Fpa,
}

#[derive(Args, Debug)]
pub struct DemoArgs {
    #[arg(value_enum)]
    pub fixture: FixtureName,
    #[arg(long, default_value_t = 2)]
    pub groups: usize,
    #[arg(long, default_value_t = 2)]
    pub r: usize,
    #[arg(long, default_value = "1/2")]
    pub p: String,
    /// Monte Carlo samples for the partition demo (0 disables sampling).
    #[arg(long, default_value_t = 0)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum FixtureCommand {
    /// Write a fixture's mechanism document.
    Export {
        #[arg(value_enum)]
        name: FixtureName,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the prior of the correlated or partition fixture.
    Prior {
        #[arg(value_enum)]
        name: FixtureName,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    // Exit quietly when piped into `head` and friends.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let style = Style {
        decimal: cli.decimal,
        json: cli.json,
    };
    match commands::run(&cli.command, style) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
