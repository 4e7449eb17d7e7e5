//! `pogrid`: scenario generation, ground-truth grids, training, inference,
//! evaluation, criticality and timing from the command line.
//!
//! Exit codes: 0 on success, 1 for domain errors, 2 for usage and
//! configuration errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "pogrid",
    version,
    about = "Predicted-occupancy grids: model-based and learned"
)]
pub struct Cli {
    /// Run configuration (TOML); defaults apply to missing fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every logical core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Preset {
    Intersection,
    StraightRoad,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expand a scenario sweep into a dataset of augmented and predicted grids.
    GenerateDataset {
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        scenario: Option<PathBuf>,
        /// Built-in scenario instead of a file.
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ground-truth grids of a single scene.
    Simulate {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the per-cell classifiers on a dataset's training split.
    Train {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate the predicted grids of a scene (or of a stored augmented grid).
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, conflicts_with = "aog", required_unless_present = "aog")]
        scene: Option<PathBuf>,
        #[arg(long)]
        aog: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Quality of a model on a dataset's test split.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        /// JSON report; histograms go next to it with a `.csv` extension.
        #[arg(long)]
        out: PathBuf,
    },
    /// Collision criticality of the ego vehicle in a scene.
    Criticality {
        #[arg(long)]
        scene: PathBuf,
        /// Ego object id; defaults to the scene's ego.
        #[arg(long)]
        ego: Option<u32>,
        /// Estimate the other objects' grids with this model.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Median wall clock of model-based construction against inference.
    Benchmark {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e
                .downcast_ref::<pogrid_core::Error>()
                .is_some_and(pogrid_core::Error::is_usage)
                || e.downcast_ref::<commands::UsageError>().is_some();
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
