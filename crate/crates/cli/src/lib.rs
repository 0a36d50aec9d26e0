//! `fibergrip`: command-line toolkit around the tactile-finger library —
//! dataset generation, model training and evaluation, fiber ablation,
//! streaming prediction, and grasp-policy simulation.

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

use std::path::PathBuf;

use anyhow::Result;
use clap::{ArgAction, Parser, Subcommand};

use fibergrip_core::calibration::Target;

use crate::commands::parse_target;
use crate::output::Outputs;

#[derive(Parser, Debug)]
#[command(
    name = "fibergrip",
    version,
    about = "Tactile-finger calibration and interactive-grasping toolkit"
)]
pub struct Cli {
    /// JSON run-configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Master seed for every randomized stage.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Base directory for datasets, models, and reports.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Dotted config override, e.g. --set protocol.n_points=200 (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE", action = ArgAction::Append)]
    pub sets: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Collect the main and vertical calibration datasets.
    Generate,
    /// Grid-search all enabled model families on one target and save the
    /// winner.
    Train {
        /// force | torque | position-horizontal | position-vertical
        #[arg(long, value_parser = parse_target)]
        target: Target,
    },
    /// Score a previously trained model on its dataset splits.
    Evaluate {
        /// force | torque | position-horizontal | position-vertical
        #[arg(long, value_parser = parse_target)]
        target: Target,
        /// Model file to score (defaults to the trained model for the target).
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
    },
    /// Rank fibers by importance and cross-validate refits as fibers drop.
    Ablate {
        /// force | torque | position-horizontal | position-vertical
        #[arg(long, value_parser = parse_target)]
        target: Target,
    },
    /// Replay a continuous random contact trajectory through the trained
    /// models.
    Stream,
    /// Compare conventional vs interactive grasping over the object suite.
    Grasp,
    /// Cross-target model comparison matrix (every family on every target).
    Compare,
}

/// Execute a parsed invocation. On failure every file the command had
/// already produced is removed, so outputs are all-or-nothing.
pub fn run(cli: Cli) -> Result<()> {
    let config = config::load_config(
        cli.config.as_deref(),
        &cli.sets,
        cli.seed,
        cli.out.as_deref(),
    )?;
    let out = Outputs::default();
    let result = match &cli.command {
        Command::Generate => commands::generate::run(&config, &out),
        Command::Train { target } => commands::train::run(&config, &out, *target),
        Command::Evaluate { target, model } => {
            commands::evaluate::run(&config, &out, *target, model.as_deref())
        }
        Command::Ablate { target } => commands::ablate::run(&config, &out, *target),
        Command::Stream => commands::stream::run(&config, &out),
        Command::Grasp => commands::grasp::run(&config, &out),
        Command::Compare => commands::compare::run(&config, &out),
    };
    if result.is_err() {
        out.discard_all();
    }
    result
}
