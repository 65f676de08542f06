use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use autodi::config::{OracleKind, RunConfig};
use autodi::pipeline::{Pipeline, PipelineError, Step};
use autodi::synth::{generate_fixture, FixtureSpec};

#[derive(Parser)]
#[command(
    name = "autodi",
    version,
    about = "Config-driven data integration with an oracle in the loop"
)]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Run configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "all")]
    step: StepArg,
    /// Overrides `oracle.kind`.
    #[arg(long, value_enum)]
    oracle: Option<OracleArg>,
    /// Overrides `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `out`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the synthetic three-source fixture with its config and gold files.
    GenerateFixture {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 2900)]
        entities: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StepArg {
    Profile,
    MatchSchema,
    Normalize,
    MatchEntities,
    Cluster,
    Fuse,
    Report,
    All,
}

impl From<StepArg> for Step {
    fn from(s: StepArg) -> Self {
        match s {
            StepArg::Profile => Step::Profile,
            StepArg::MatchSchema => Step::MatchSchema,
            StepArg::Normalize => Step::Normalize,
            StepArg::MatchEntities => Step::MatchEntities,
            StepArg::Cluster => Step::Cluster,
            StepArg::Fuse => Step::Fuse,
            StepArg::Report => Step::Report,
            StepArg::All => Step::All,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Mock,
    Remote,
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, PipelineError> {
    let Some(path) = cli.config else {
        return Err(autodi::config::ConfigError::Invalid("--config is required".into()).into());
    };
    let mut cfg = RunConfig::load(&path)?;
    if let Some(o) = cli.oracle {
        cfg.oracle.kind = match o {
            OracleArg::Mock => OracleKind::Mock,
            OracleArg::Remote => OracleKind::Remote,
        };
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(out) = cli.out {
        cfg.out = out;
    }
    Pipeline::new(cfg)?.run(cli.step.into())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let mut cli = Cli::parse();
    if let Some(Command::GenerateFixture { out, seed, entities }) = cli.command.take() {
        return match generate_fixture(&out, &FixtureSpec { seed, entities }) {
            Ok(summary) => {
                println!("{}", summary.config.display());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        };
    }
    match run(cli) {
        Ok(paths) => {
            let mut seen = BTreeSet::new();
            for p in paths {
                if seen.insert(p.clone()) {
                    println!("{}", p.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
