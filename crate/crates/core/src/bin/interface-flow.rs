use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use interface_flow::cli::{self, RunConfig};
use interface_flow::FlowError;

#[derive(Parser)]
#[command(
    version,
    about = "Spectral flow and interface conductivity of magnetic Dirac domain walls"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// Worker threads for fiber solves and per-alpha analyses.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Verb {
    /// Landau levels and predicted spectral flow.
    BulkSpectrum(Source),
    /// Track eigenvalue branches and plot them.
    Branches(Source),
    /// Spectral flow and conductivity, reconciled with the prediction.
    Flow(Source),
    /// Dense 2D trace and stability experiments.
    Oracle(Source),
    /// Branch plots and flow tables for every preset panel.
    AllFigures {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Source {
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// Overrides the output directory of the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Source {
    fn load(&self) -> interface_flow::Result<RunConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => RunConfig::load(path)?,
            (None, Some(name)) => cli::preset(name)?,
            (None, None) => {
                return Err(FlowError::Config(
                    "one of --config or --preset is required".into(),
                ))
            }
        };
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        Ok(cfg)
    }
}

fn run(args: &Cli) -> interface_flow::Result<bool> {
    let outcomes = match &args.verb {
        Verb::BulkSpectrum(s) => vec![cli::cmd_bulk(&s.load()?)?],
        Verb::Branches(s) => vec![cli::cmd_branches(&s.load()?)?],
        Verb::Flow(s) => vec![cli::cmd_flow(&s.load()?)?],
        Verb::Oracle(s) => vec![cli::cmd_oracle(&s.load()?)?],
        Verb::AllFigures { out } => cli::all_figures(out)?,
    };
    for o in &outcomes {
        print!("{}", o.table);
    }
    Ok(outcomes.iter().all(|o| o.ok()))
}

fn main() -> ExitCode {
    let args = Cli::parse();
    if let Some(n) = args.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: verdicts failed, see manifest.json");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
