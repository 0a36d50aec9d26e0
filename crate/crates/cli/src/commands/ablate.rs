//! `ablate`: rank the five fiber channels by forest importance, then retire
//! them least-important-first, cross-validating a refit at every step.

use anyhow::Result;

use fibergrip_core::calibration::{
    ablate_features, importance_order, AblationStep, ForestParams, ModelSpec, RandomForest, Target,
};
use fibergrip_core::seeding::{domain, subseed};
use fibergrip_core::text::fmt_sig9;

use crate::commands::SplitData;
use crate::config::RunConfig;
use crate::output::{table, Outputs};

/// Human name of a feature column: fibers are numbered from 1.
fn fiber_name(column: usize) -> String {
    format!("a{}", column + 1)
}

fn kept_label(kept: &[usize]) -> String {
    kept.iter()
        .map(|&c| fiber_name(c))
        .collect::<Vec<_>>()
        .join("+")
}

/// Render the ablation ladder as CSV.
pub fn ablation_csv(steps: &[AblationStep]) -> String {
    let mut out = String::from("n_features,kept_fibers,cv_rmse\n");
    for step in steps {
        out.push_str(&format!(
            "{},{},{}\n",
            step.kept_features.len(),
            kept_label(&step.kept_features),
            fmt_sig9(step.cv_rmse)
        ));
    }
    out
}

pub fn run(config: &RunConfig, out: &Outputs, target: Target) -> Result<()> {
    let seed = config.require_seed()?;
    let dataset = crate::commands::load_dataset(config, target)?;
    let data = SplitData::of(&dataset, target);

    // Channel ranking comes from a default forest fit on the training split.
    let forest = RandomForest::fit(
        &data.x_train,
        &data.y_train,
        &ForestParams::default(),
        subseed(seed, domain::FOREST),
    )?;
    let importance = forest.feature_importance();
    let order = importance_order(&importance);

    let spec = ModelSpec::default_for(config.ablation.family);
    let steps = ablate_features(
        &spec,
        &data.x_train,
        &data.y_train,
        &order,
        config.cv_folds,
        seed,
    )?;

    let importance_file = config
        .report_dir()
        .join(format!("importance_{}.csv", target.label()));
    let mut importance_csv = String::from("fiber,importance\n");
    for (c, imp) in importance.iter().enumerate() {
        importance_csv.push_str(&format!("{},{}\n", fiber_name(c), fmt_sig9(*imp)));
    }
    out.write(&importance_file, &importance_csv)?;

    let ablation_file = config
        .report_dir()
        .join(format!("ablation_{}.csv", target.label()));
    out.write(&ablation_file, &ablation_csv(&steps))?;

    println!(
        "target: {} (refitting {} at each step)",
        target.label(),
        spec.kind().label()
    );
    let rows: Vec<Vec<String>> = steps
        .iter()
        .map(|s| {
            vec![
                s.kept_features.len().to_string(),
                kept_label(&s.kept_features),
                format!("{:.4}", s.cv_rmse),
            ]
        })
        .collect();
    print!("{}", table(&["fibers", "kept", "cv rmse"], &rows));
    println!("saved importances to {}", importance_file.display());
    println!("saved ablation curve to {}", ablation_file.display());
    Ok(())
}
