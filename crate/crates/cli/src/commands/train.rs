//! `train`: grid-search every enabled model family on one target, report
//! baseline/CV/test errors per family, and save the overall winner.

use anyhow::{Context, Result};

use fibergrip_core::calibration::{
    default_grid, grid_search, GridSearchResult, ModelKind, Target,
};
use fibergrip_core::text::fmt_sig9;

use crate::commands::{model_path, SplitData};
use crate::config::RunConfig;
use crate::output::{csv_field, table, Outputs};

/// One family's best candidate and its scores.
pub struct FamilyScore {
    pub family: ModelKind,
    pub result: GridSearchResult,
}

/// Run each enabled family's hyperparameter grid against the same folds.
pub fn search_families(
    config: &RunConfig,
    target: Target,
    data: &SplitData,
    seed: u64,
) -> Result<Vec<FamilyScore>> {
    config
        .families
        .iter()
        .map(|&family| {
            let grid = default_grid(family);
            let result = grid_search(
                &grid,
                target,
                &data.x_train,
                &data.y_train,
                config.cv_folds,
                seed,
                Some((&data.x_test, &data.y_test)),
            )
            .with_context(|| format!("grid search failed for the {} family", family.label()))?;
            Ok(FamilyScore { family, result })
        })
        .collect()
}

/// Index of the family with the lowest validation error (earliest on ties).
pub fn winner_index(scores: &[FamilyScore]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if s.result.report.cv_rmse < scores[best].result.report.cv_rmse {
            best = i;
        }
    }
    best
}

/// Render the per-family score table as CSV.
pub fn scores_csv(scores: &[FamilyScore], winner: usize) -> String {
    let mut out = String::from("family,hyperparameters,baseline_rmse,cv_rmse,test_rmse,winner\n");
    for (i, s) in scores.iter().enumerate() {
        let report = &s.result.report;
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            s.family.label(),
            csv_field(&s.result.model.spec.describe()),
            fmt_sig9(report.baseline_rmse),
            fmt_sig9(report.cv_rmse),
            fmt_sig9(report.test_rmse.unwrap_or(f64::NAN)),
            i == winner
        ));
    }
    out
}

fn scores_table(scores: &[FamilyScore], winner: usize) -> String {
    let rows: Vec<Vec<String>> = scores
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let report = &s.result.report;
            vec![
                s.family.label().to_string(),
                s.result.model.spec.describe(),
                format!("{:.4}", report.baseline_rmse),
                format!("{:.4}", report.cv_rmse),
                format!("{:.4}", report.test_rmse.unwrap_or(f64::NAN)),
                if i == winner { "<- winner".to_string() } else { String::new() },
            ]
        })
        .collect();
    table(
        &["family", "best hyperparameters", "baseline", "cv", "test", ""],
        &rows,
    )
}

pub fn run(config: &RunConfig, out: &Outputs, target: Target) -> Result<()> {
    let seed = config.require_seed()?;
    let dataset = crate::commands::load_dataset(config, target)?;
    let data = SplitData::of(&dataset, target);

    let scores = search_families(config, target, &data, seed)?;
    let winner = winner_index(&scores);

    let model_file = model_path(config, target);
    out.write(&model_file, &scores[winner].result.model.to_json()?)?;
    let report_file = config
        .report_dir()
        .join(format!("train_{}.csv", target.label()));
    out.write(&report_file, &scores_csv(&scores, winner))?;

    println!("target: {}", target.label());
    print!("{}", scores_table(&scores, winner));
    println!("saved model to {}", model_file.display());
    println!("saved report to {}", report_file.display());
    Ok(())
}
