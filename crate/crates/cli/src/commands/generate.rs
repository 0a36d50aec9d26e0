//! `generate`: collect both calibration datasets from the forward model.

use anyhow::Result;

use fibergrip_core::calibration::{Dataset, Split};

use crate::config::RunConfig;
use crate::output::Outputs;

pub fn run(config: &RunConfig, out: &Outputs) -> Result<()> {
    let seed = config.require_seed()?;
    let model = config.sensor_model(seed);

    let main = Dataset::generate(&model, &config.protocol, seed)?;
    let vertical = Dataset::generate_vertical(&model, &config.vertical, seed)?;

    let main_path = config.dataset_path();
    let vertical_path = config.vertical_dataset_path();
    out.write(&main_path, &main.to_csv())?;
    out.write(&vertical_path, &vertical.to_csv())?;

    println!(
        "wrote {} ({} samples: {} train / {} test)",
        main_path.display(),
        main.len(),
        main.indices_of(Split::Train).len(),
        main.indices_of(Split::Test).len()
    );
    println!(
        "wrote {} ({} samples: {} train / {} test)",
        vertical_path.display(),
        vertical.len(),
        vertical.indices_of(Split::Train).len(),
        vertical.indices_of(Split::Test).len()
    );
    Ok(())
}
