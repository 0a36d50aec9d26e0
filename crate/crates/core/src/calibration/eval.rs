//! Model selection and evaluation: RMSE, seeded k-fold cross-validation,
//! hyperparameter grid search, and importance-ordered feature ablation.
//!
//! Every routine here is deterministic given its seed: folds come from a
//! seeded shuffle shared by all grid points (so candidates are compared on
//! identical partitions), per-fold fits derive their seeds from the fold
//! index, and ties in the grid resolve to the earliest candidate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding::{domain, subseed};

use super::dataset::Target;
use super::forest::ForestParams;
use super::model::{ModelKind, ModelSpec, TrainedModel};
use super::svr::SvrParams;
use super::tree::TreeParams;

/// Root mean squared error between predictions and ground truth.
pub fn rmse(predictions: &[f64], truth: &[f64]) -> Result<f64> {
    if predictions.is_empty() || predictions.len() != truth.len() {
        return Err(Error::argument(
            "rmse requires matching, non-empty prediction and truth slices",
        ));
    }
    let mse = predictions
        .iter()
        .zip(truth)
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        / predictions.len() as f64;
    Ok(mse.sqrt())
}

/// Split `0..n` into `k` folds by seeded shuffle. Folds are disjoint,
/// exhaustive, and differ in size by at most one.
pub fn kfold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::argument("cross-validation needs at least 2 folds"));
    }
    if k > n {
        return Err(Error::argument(format!(
            "cannot split {n} samples into {k} folds"
        )));
    }
    use rand::{Rng, SeedableRng};
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    // The first n % k folds take one extra sample.
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut cursor = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        folds.push(order[cursor..cursor + size].to_vec());
        cursor += size;
    }
    Ok(folds)
}

fn take_rows(x: &[Vec<f64>], rows: &[usize]) -> Vec<Vec<f64>> {
    rows.iter().map(|&r| x[r].clone()).collect()
}

fn take_values(y: &[f64], rows: &[usize]) -> Vec<f64> {
    rows.iter().map(|&r| y[r]).collect()
}

/// Validation error of `spec` under k-fold cross-validation on precomputed
/// folds. Returns the mean fold RMSE and the per-fold scores.
pub fn cross_validate_on_folds(
    spec: &ModelSpec,
    x: &[Vec<f64>],
    y: &[f64],
    folds: &[Vec<usize>],
    seed: u64,
) -> Result<(f64, Vec<f64>)> {
    let mut scores = Vec::with_capacity(folds.len());
    for (f, holdout) in folds.iter().enumerate() {
        let in_holdout: std::collections::HashSet<usize> = holdout.iter().copied().collect();
        let train_rows: Vec<usize> = (0..x.len()).filter(|r| !in_holdout.contains(r)).collect();
        let fit_seed = subseed(seed, domain::CV_FIT_BASE + f as u64);
        let fitted = spec.fit(
            &take_rows(x, &train_rows),
            &take_values(y, &train_rows),
            fit_seed,
        )?;
        let holdout_x = take_rows(x, holdout);
        let holdout_y = take_values(y, holdout);
        let preds: Vec<f64> = holdout_x.iter().map(|row| {
            // The candidate was fitted on full-width rows; widths agree here by
            // construction, so predict directly off the fitted parameters.
            fitted_predict(&fitted, row)
        }).collect();
        scores.push(rmse(&preds, &holdout_y)?);
    }
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    Ok((mean, scores))
}

fn fitted_predict(fitted: &super::model::FittedParams, row: &[f64]) -> f64 {
    use super::model::FittedParams;
    match fitted {
        FittedParams::Linear(m) => m.predict_one(row),
        FittedParams::DecisionTree(m) => m.predict_one(row),
        FittedParams::RandomForest(m) => m.predict_one(row),
        FittedParams::Svr(m) => m.predict_one(row),
    }
}

/// Seeded k-fold cross-validation of one spec.
pub fn cross_validate(
    spec: &ModelSpec,
    x: &[Vec<f64>],
    y: &[f64],
    k: usize,
    seed: u64,
) -> Result<(f64, Vec<f64>)> {
    let folds = kfold_indices(x.len(), k, subseed(seed, domain::FOLDS))?;
    cross_validate_on_folds(spec, x, y, &folds, seed)
}

/// Outcome of evaluating one trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Error of the final model on its own training rows.
    pub baseline_rmse: f64,
    /// Mean validation error across folds during selection.
    pub cv_rmse: f64,
    pub fold_scores: Vec<f64>,
    /// Held-out error, when a test split was supplied.
    pub test_rmse: Option<f64>,
}

/// Winner of a grid search plus the audit trail of every candidate.
#[derive(Debug, Clone)]
pub struct GridSearchResult {
    pub model: TrainedModel,
    pub report: EvalReport,
    /// Index of the winner within the candidate list.
    pub best_index: usize,
    /// Mean validation error per candidate, in candidate order. Candidates
    /// whose fit failed (for example a singular linear system on a
    /// degenerate fold) carry infinity.
    pub scores: Vec<f64>,
}

/// Cross-validate every candidate on shared folds, pick the lowest mean
/// validation error (earliest candidate on ties), refit it on all rows, and
/// score the refit on the optional test split.
pub fn grid_search(
    candidates: &[ModelSpec],
    target: Target,
    x: &[Vec<f64>],
    y: &[f64],
    k: usize,
    seed: u64,
    test: Option<(&[Vec<f64>], &[f64])>,
) -> Result<GridSearchResult> {
    if candidates.is_empty() {
        return Err(Error::argument("grid search needs at least one candidate"));
    }
    let folds = kfold_indices(x.len(), k, subseed(seed, domain::FOLDS))?;

    use rayon::prelude::*;
    let outcomes: Vec<Result<(f64, Vec<f64>)>> = candidates
        .par_iter()
        .map(|spec| cross_validate_on_folds(spec, x, y, &folds, seed))
        .collect();

    let mut scores = Vec::with_capacity(candidates.len());
    let mut best: Option<(usize, f64, Vec<f64>)> = None;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok((mean, fold_scores)) => {
                scores.push(mean);
                let improves = match &best {
                    Some((_, incumbent, _)) => mean < *incumbent,
                    None => mean.is_finite(),
                };
                if improves {
                    best = Some((i, mean, fold_scores));
                }
            }
            Err(_) => scores.push(f64::INFINITY),
        }
    }
    let (best_index, cv_rmse, fold_scores) = best.ok_or_else(|| {
        Error::argument("every grid candidate failed cross-validation")
    })?;

    let mut model = TrainedModel::fit(&candidates[best_index], target, x, y, seed)?;
    model.metadata.fold_scores = fold_scores.clone();
    let train_preds = model.predict(x)?;
    let baseline_rmse = rmse(&train_preds, y)?;
    let test_rmse = match test {
        Some((tx, ty)) => Some(rmse(&model.predict(tx)?, ty)?),
        None => None,
    };
    Ok(GridSearchResult {
        model,
        report: EvalReport {
            baseline_rmse,
            cv_rmse,
            fold_scores,
            test_rmse,
        },
        best_index,
        scores,
    })
}

/// The hyperparameter grid each family is searched over.
pub fn default_grid(kind: ModelKind) -> Vec<ModelSpec> {
    match kind {
        ModelKind::Linear => vec![ModelSpec::Linear],
        ModelKind::DecisionTree => {
            let mut grid = Vec::new();
            for max_depth in [None, Some(5), Some(10), Some(20)] {
                for min_samples_leaf in [1, 2, 5, 10] {
                    grid.push(ModelSpec::DecisionTree(TreeParams {
                        max_depth,
                        min_samples_leaf,
                    }));
                }
            }
            grid
        }
        ModelKind::RandomForest => {
            let mut grid = Vec::new();
            for bootstrap in [false, true] {
                for max_features in [1, 2, 3, 5] {
                    for n_estimators in [3, 10, 30, 100] {
                        grid.push(ModelSpec::RandomForest(ForestParams {
                            n_estimators,
                            max_features: Some(max_features),
                            bootstrap,
                            tree: TreeParams::default(),
                        }));
                    }
                }
            }
            grid
        }
        ModelKind::Svr => {
            let mut grid = Vec::new();
            for c in [1.0, 10.0, 100.0, 1000.0] {
                for gamma in [0.01, 0.1, 0.3, 1.0] {
                    grid.push(ModelSpec::Svr(SvrParams {
                        c,
                        gamma,
                        ..SvrParams::default()
                    }));
                }
            }
            grid
        }
    }
}

/// Order features from least to most important: indices sorted ascending by
/// score, lower index first on ties.
pub fn importance_order(importance: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..importance.len()).collect();
    order.sort_by(|&a, &b| {
        importance[a]
            .total_cmp(&importance[b])
            .then(a.cmp(&b))
    });
    order
}

/// One step of the ablation ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationStep {
    /// Feature columns the model was refitted on, ascending.
    pub kept_features: Vec<usize>,
    pub cv_rmse: f64,
    pub fold_scores: Vec<f64>,
}

fn select_columns(x: &[Vec<f64>], cols: &[usize]) -> Vec<Vec<f64>> {
    x.iter()
        .map(|row| cols.iter().map(|&c| row[c]).collect())
        .collect()
}

/// Clamp sub-row hyperparameters so a spec tuned for the full feature set
/// stays valid on a narrower one.
fn clamp_spec(spec: &ModelSpec, width: usize) -> ModelSpec {
    match spec {
        ModelSpec::RandomForest(p) => {
            let mut p = *p;
            p.max_features = p.max_features.map(|k| k.min(width));
            ModelSpec::RandomForest(p)
        }
        other => *other,
    }
}

/// Drop features one at a time in the given least-to-most-important order,
/// cross-validating a refit of `spec` on each surviving subset. The first
/// step keeps every feature; the last keeps only the most important one.
pub fn ablate_features(
    spec: &ModelSpec,
    x: &[Vec<f64>],
    y: &[f64],
    least_to_most: &[usize],
    k: usize,
    seed: u64,
) -> Result<Vec<AblationStep>> {
    if x.is_empty() {
        return Err(Error::argument("ablation needs a non-empty dataset"));
    }
    let d = x[0].len();
    let mut check: Vec<usize> = least_to_most.to_vec();
    check.sort_unstable();
    if check != (0..d).collect::<Vec<_>>() {
        return Err(Error::argument(format!(
            "ablation order must be a permutation of 0..{d}"
        )));
    }

    let mut steps = Vec::with_capacity(d);
    for dropped in 0..d {
        let mut kept: Vec<usize> = least_to_most[dropped..].to_vec();
        kept.sort_unstable();
        let sub_x = select_columns(x, &kept);
        let sub_spec = clamp_spec(spec, kept.len());
        let (cv_rmse, fold_scores) = cross_validate(&sub_spec, &sub_x, y, k, seed)?;
        steps.push(AblationStep {
            kept_features: kept,
            cv_rmse,
            fold_scores,
        });
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rmse_matches_hand_computation() {
        let pred = [1.0, 2.0, 3.0];
        let truth = [1.0, 4.0, 2.0];
        // Squared errors 0, 4, 1; mean 5/3.
        let expect = (5.0f64 / 3.0).sqrt();
        assert!((rmse(&pred, &truth).unwrap() - expect).abs() < 1e-15);
        assert_eq!(rmse(&pred, &pred).unwrap(), 0.0);
        assert!(rmse(&[], &[]).is_err());
        assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn folds_partition_the_rows() {
        let folds = kfold_indices(23, 5, 7).unwrap();
        assert_eq!(folds.len(), 5);
        let sizes: Vec<usize> = folds.iter().map(|f| f.len()).collect();
        assert_eq!(sizes, vec![5, 5, 5, 4, 4]);
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..23).collect::<Vec<_>>());
        assert_eq!(kfold_indices(23, 5, 7).unwrap(), folds);
        assert_ne!(kfold_indices(23, 5, 8).unwrap(), folds);
        assert!(kfold_indices(3, 5, 0).is_err());
        assert!(kfold_indices(10, 1, 0).is_err());
    }

    fn planted(n: usize, seed: u64, noise: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = x
            .iter()
            .map(|r| 2.0 * r[0] - r[2] + rng.gen_range(-noise..=noise))
            .collect();
        (x, y)
    }

    #[test]
    fn cross_validation_error_tracks_the_noise_floor() {
        let (x, y) = planted(200, 1, 0.01);
        let (cv, folds) = cross_validate(&ModelSpec::Linear, &x, &y, 5, 0).unwrap();
        assert_eq!(folds.len(), 5);
        // Uniform(-0.01, 0.01) noise has RMS ~0.0058; the fit cannot beat it
        // and should not be far above it.
        assert!(cv > 0.001 && cv < 0.02, "cv {cv}");
        let mean = folds.iter().sum::<f64>() / folds.len() as f64;
        assert!((cv - mean).abs() < 1e-15);
    }

    #[test]
    fn grid_search_prefers_the_better_family() {
        // Strongly nonlinear target: a stump-depth tree beats a line.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x: Vec<Vec<f64>> = (0..150).map(|_| vec![rng.gen_range(-2.0..2.0)]).collect();
        let y: Vec<f64> = x.iter().map(|r| if r[0] > 0.0 { 5.0 } else { -5.0 }).collect();
        let candidates = [
            ModelSpec::Linear,
            ModelSpec::DecisionTree(TreeParams::default()),
        ];
        let result =
            grid_search(&candidates, Target::Force, &x, &y, 5, 3, None).unwrap();
        assert_eq!(result.best_index, 1);
        assert!(result.scores[1] < result.scores[0]);
        assert!(result.report.cv_rmse < 0.5);
        assert!(result.report.test_rmse.is_none());
    }

    #[test]
    fn grid_search_ties_resolve_to_the_first_candidate() {
        let (x, y) = planted(60, 4, 0.0);
        let candidates = [ModelSpec::Linear, ModelSpec::Linear];
        let result = grid_search(&candidates, Target::Force, &x, &y, 4, 0, None).unwrap();
        assert_eq!(result.best_index, 0);
        assert_eq!(result.scores[0], result.scores[1]);
    }

    #[test]
    fn grid_search_reports_test_error_and_survives_failed_candidates() {
        let (x, y) = planted(120, 5, 0.05);
        let (tx, ty) = planted(40, 6, 0.05);
        // A zero-leaf tree spec fails validation on every fold; the search
        // must skip it and still succeed.
        let candidates = [
            ModelSpec::DecisionTree(TreeParams {
                min_samples_leaf: 0,
                ..TreeParams::default()
            }),
            ModelSpec::Linear,
        ];
        let result = grid_search(
            &candidates,
            Target::Force,
            &x,
            &y,
            5,
            1,
            Some((&tx, &ty)),
        )
        .unwrap();
        assert_eq!(result.best_index, 1);
        assert!(result.scores[0].is_infinite());
        let test_rmse = result.report.test_rmse.unwrap();
        assert!(test_rmse < 0.1, "test rmse {test_rmse}");
    }

    #[test]
    fn default_grids_have_the_documented_shapes() {
        assert_eq!(default_grid(ModelKind::Linear).len(), 1);
        assert_eq!(default_grid(ModelKind::DecisionTree).len(), 16);
        assert_eq!(default_grid(ModelKind::RandomForest).len(), 32);
        assert_eq!(default_grid(ModelKind::Svr).len(), 16);
        for kind in ModelKind::ALL {
            for spec in default_grid(kind) {
                assert_eq!(spec.kind(), kind);
            }
        }
    }

    #[test]
    fn importance_order_sorts_ascending_with_stable_ties() {
        assert_eq!(importance_order(&[0.5, 0.1, 0.4]), vec![1, 2, 0]);
        assert_eq!(importance_order(&[0.3, 0.3, 0.1]), vec![2, 0, 1]);
    }

    #[test]
    fn ablation_walks_nested_subsets() {
        // Feature 1 carries all the signal; 0 and 2 are noise.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x: Vec<Vec<f64>> = (0..120)
            .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = x.iter().map(|r| 3.0 * r[1]).collect();
        let steps = ablate_features(
            &ModelSpec::Linear,
            &x,
            &y,
            &[0, 2, 1],
            5,
            0,
        )
        .unwrap();
        assert_eq!(steps.len(), 3);
        assert_eq!(steps[0].kept_features, vec![0, 1, 2]);
        assert_eq!(steps[1].kept_features, vec![1, 2]);
        assert_eq!(steps[2].kept_features, vec![1]);
        // Dropping pure-noise features cannot hurt a noiseless linear fit.
        assert!(steps[2].cv_rmse < 1e-6, "final step rmse {}", steps[2].cv_rmse);
    }

    #[test]
    fn ablation_rejects_non_permutations() {
        let x = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        let y = vec![1.0, 2.0];
        assert!(ablate_features(&ModelSpec::Linear, &x, &y, &[0, 0], 2, 0).is_err());
        assert!(ablate_features(&ModelSpec::Linear, &x, &y, &[0], 2, 0).is_err());
        assert!(ablate_features(&ModelSpec::Linear, &x, &y, &[1, 2], 2, 0).is_err());
    }

    #[test]
    fn forest_spec_is_clamped_to_narrow_subsets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<Vec<f64>> = (0..60)
            .map(|_| (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = x.iter().map(|r| r[0]).collect();
        let spec = ModelSpec::RandomForest(ForestParams {
            n_estimators: 5,
            max_features: Some(5),
            bootstrap: false,
            tree: TreeParams::default(),
        });
        // Width-1 refits would be invalid without the clamp.
        let steps = ablate_features(&spec, &x, &y, &[1, 0], 3, 0).unwrap();
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[1].kept_features, vec![0]);
    }
}
