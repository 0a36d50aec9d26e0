//! Subcommand implementations and the helpers they share.

pub mod ablate;
pub mod compare;
pub mod evaluate;
pub mod generate;
pub mod grasp;
pub mod stream;
pub mod train;

use std::path::PathBuf;

use anyhow::{bail, Context, Result};

use fibergrip_core::calibration::{Dataset, Split, Target};

use crate::config::RunConfig;

/// Parse a target name as it appears in reports and file names.
pub fn parse_target(s: &str) -> std::result::Result<Target, String> {
    Target::ALL
        .iter()
        .copied()
        .find(|t| t.label() == s)
        .ok_or_else(|| {
            let names: Vec<&str> = Target::ALL.iter().map(|t| t.label()).collect();
            format!("unknown target '{s}'; expected one of {}", names.join(", "))
        })
}

/// Where the trained model for a target is stored.
pub fn model_path(config: &RunConfig, target: Target) -> PathBuf {
    config.model_dir().join(format!("{}.json", target.label()))
}

/// The dataset file a target is calibrated against: the vertical sweep for
/// the vertical position, the main sweep for everything else.
pub fn dataset_path_for(config: &RunConfig, target: Target) -> PathBuf {
    match target {
        Target::PositionVertical => config.vertical_dataset_path(),
        _ => config.dataset_path(),
    }
}

/// Load the dataset backing a target, with actionable errors.
pub fn load_dataset(config: &RunConfig, target: Target) -> Result<Dataset> {
    let path = dataset_path_for(config, target);
    if !path.exists() {
        bail!(
            "dataset {} not found; run `fibergrip generate` first",
            path.display()
        );
    }
    Dataset::read_csv(&path, config.seed.unwrap_or(0))
        .with_context(|| format!("cannot load dataset {}", path.display()))
}

/// Feature/target matrices for both splits of a dataset.
pub struct SplitData {
    pub x_train: Vec<Vec<f64>>,
    pub y_train: Vec<f64>,
    pub x_test: Vec<Vec<f64>>,
    pub y_test: Vec<f64>,
}

impl SplitData {
    pub fn of(dataset: &Dataset, target: Target) -> SplitData {
        let train = dataset.indices_of(Split::Train);
        let test = dataset.indices_of(Split::Test);
        SplitData {
            x_train: dataset.features(&train, None),
            y_train: dataset.targets(&train, target),
            x_test: dataset.features(&test, None),
            y_test: dataset.targets(&test, target),
        }
    }
}
