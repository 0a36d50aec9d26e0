//! `evaluate`: score a previously trained model on its dataset splits.

use std::path::Path;

use anyhow::{bail, Context, Result};

use fibergrip_core::calibration::{rmse, Target, TrainedModel};
use fibergrip_core::text::fmt_sig9;

use crate::commands::{model_path, SplitData};
use crate::config::RunConfig;
use crate::output::{csv_field, table, Outputs};

pub fn run(
    config: &RunConfig,
    out: &Outputs,
    target: Target,
    model_override: Option<&Path>,
) -> Result<()> {
    let path = match model_override {
        Some(p) => p.to_path_buf(),
        None => model_path(config, target),
    };
    if !path.exists() {
        bail!(
            "no trained model for {} at {}; run `fibergrip train --target {}` first",
            target.label(),
            path.display(),
            target.label()
        );
    }
    let model = TrainedModel::load(&path)
        .with_context(|| format!("cannot load model {}", path.display()))?;
    if model.target != target {
        bail!(
            "model at {} was trained for {}, not {}",
            path.display(),
            model.target.label(),
            target.label()
        );
    }

    let dataset = crate::commands::load_dataset(config, target)?;
    let data = SplitData::of(&dataset, target);
    let baseline = rmse(&model.predict(&data.x_train)?, &data.y_train)?;
    let test = rmse(&model.predict(&data.x_test)?, &data.y_test)?;

    let report_file = config
        .report_dir()
        .join(format!("evaluate_{}.csv", target.label()));
    let csv = format!(
        "target,family,hyperparameters,baseline_rmse,test_rmse,n_train,n_test\n{},{},{},{},{},{},{}\n",
        target.label(),
        model.spec.kind().label(),
        csv_field(&model.spec.describe()),
        fmt_sig9(baseline),
        fmt_sig9(test),
        data.x_train.len(),
        data.x_test.len()
    );
    out.write(&report_file, &csv)?;

    print!(
        "{}",
        table(
            &["target", "family", "baseline", "test"],
            &[vec![
                target.label().to_string(),
                model.spec.describe(),
                format!("{baseline:.4}"),
                format!("{test:.4}"),
            ]],
        )
    );
    println!("saved report to {}", report_file.display());
    Ok(())
}
