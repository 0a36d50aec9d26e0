//! Bagged ensembles of regression trees.
//!
//! Each tree gets its own stream-split RNG derived from the ensemble seed and
//! its index, so the forest is reproducible regardless of how many threads
//! fit it. Randomness enters in two places: an optional bootstrap draw of the
//! training rows, and a fresh draw of candidate features at every split.
//! Predictions average the member trees.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding::subseed;

use super::tree::{DecisionTree, TreeParams};

/// Ensemble shape and randomness controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    /// Number of trees.
    pub n_estimators: usize,
    /// Candidate features drawn at each split; `None` considers all of them.
    pub max_features: Option<usize>,
    /// Resample rows with replacement per tree instead of using all rows.
    pub bootstrap: bool,
    /// Growth limits shared by every tree.
    pub tree: TreeParams,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_estimators: 100,
            max_features: None,
            bootstrap: false,
            tree: TreeParams::default(),
        }
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_estimators == 0 {
            return Err(Error::argument("a forest needs at least one tree"));
        }
        if self.max_features == Some(0) {
            return Err(Error::argument("per-split feature draw must be at least 1"));
        }
        self.tree.validate()
    }
}

/// A fitted forest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    pub n_features: usize,
    pub params: ForestParams,
    pub seed: u64,
}

impl RandomForest {
    pub fn fit(x: &[Vec<f64>], y: &[f64], params: &ForestParams, seed: u64) -> Result<RandomForest> {
        params.validate()?;
        if x.is_empty() || x.len() != y.len() {
            return Err(Error::argument(
                "fit requires matching, non-empty features and targets",
            ));
        }
        let d = x[0].len();
        if d == 0 || x.iter().any(|row| row.len() != d) {
            return Err(Error::argument("feature rows must share a non-zero width"));
        }
        // Clamp the draw so a subset-features refit (fewer columns than the
        // configured draw) stays valid.
        let max_features = params.max_features.map(|k| k.min(d));

        let trees: Vec<Result<DecisionTree>> = (0..params.n_estimators)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(subseed(seed, t as u64));
                let rows: Vec<usize> = if params.bootstrap {
                    (0..x.len()).map(|_| rng.gen_range(0..x.len())).collect()
                } else {
                    (0..x.len()).collect()
                };
                match max_features {
                    Some(k) => {
                        DecisionTree::fit_on_rows(x, y, &rows, &params.tree, Some((&mut rng, k)))
                    }
                    None => DecisionTree::fit_on_rows(x, y, &rows, &params.tree, None),
                }
            })
            .collect();
        let trees = trees.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(RandomForest {
            trees,
            n_features: d,
            params: *params,
            seed,
        })
    }

    pub fn predict_one(&self, x: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict_one(x)).sum();
        sum / self.trees.len() as f64
    }

    pub fn predict(&self, x: &[Vec<f64>]) -> Vec<f64> {
        x.iter().map(|row| self.predict_one(row)).collect()
    }

    /// Mean decrease in squared error per feature, normalized to sum to one.
    ///
    /// Each tree's split gains are first normalized within the tree (so a
    /// deep tree does not dominate by sheer node count), then averaged across
    /// trees and renormalized. A forest of pure leaves — no splits anywhere —
    /// falls back to a uniform attribution.
    pub fn feature_importance(&self) -> Vec<f64> {
        let d = self.n_features;
        let mut mean_share = vec![0.0; d];
        let mut contributing = 0usize;
        for tree in &self.trees {
            let mut gains = vec![0.0; d];
            tree.accumulate_gains(&mut gains);
            let total: f64 = gains.iter().sum();
            if total > 0.0 {
                for (m, g) in mean_share.iter_mut().zip(&gains) {
                    *m += g / total;
                }
                contributing += 1;
            }
        }
        if contributing == 0 {
            return vec![1.0 / d as f64; d];
        }
        let total: f64 = mean_share.iter().sum();
        mean_share.iter().map(|&s| s / total).collect()
    }
}
