//! Model family descriptors and the persisted trained-model envelope.
//!
//! A [`ModelSpec`] names a regressor family plus its hyperparameters and is
//! what grid search enumerates; a [`TrainedModel`] is a spec plus the fitted
//! parameters, the predicted target, and enough metadata (seed, fold scores)
//! to reproduce or audit the fit. The envelope serializes to JSON and a
//! reloaded model predicts bit-identically to the one that was saved.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::dataset::Target;
use super::forest::{ForestParams, RandomForest};
use super::linear::LinearModel;
use super::svr::{SvrModel, SvrParams};
use super::tree::{DecisionTree, TreeParams};

/// The regressor families this crate trains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Linear,
    DecisionTree,
    RandomForest,
    Svr,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::Linear,
        ModelKind::DecisionTree,
        ModelKind::RandomForest,
        ModelKind::Svr,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ModelKind::Linear => "linear",
            ModelKind::DecisionTree => "decision-tree",
            ModelKind::RandomForest => "random-forest",
            ModelKind::Svr => "svr",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<ModelKind> {
        match s {
            "linear" => Ok(ModelKind::Linear),
            "decision-tree" => Ok(ModelKind::DecisionTree),
            "random-forest" => Ok(ModelKind::RandomForest),
            "svr" => Ok(ModelKind::Svr),
            other => Err(Error::argument(format!(
                "unknown model kind {other:?} (expected linear, decision-tree, random-forest, or svr)"
            ))),
        }
    }
}

/// A regressor family with concrete hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "hyperparameters", rename_all = "kebab-case")]
pub enum ModelSpec {
    Linear,
    DecisionTree(TreeParams),
    RandomForest(ForestParams),
    Svr(SvrParams),
}

impl ModelSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::Linear => ModelKind::Linear,
            ModelSpec::DecisionTree(_) => ModelKind::DecisionTree,
            ModelSpec::RandomForest(_) => ModelKind::RandomForest,
            ModelSpec::Svr(_) => ModelKind::Svr,
        }
    }

    /// The default hyperparameters of each family.
    pub fn default_for(kind: ModelKind) -> ModelSpec {
        match kind {
            ModelKind::Linear => ModelSpec::Linear,
            ModelKind::DecisionTree => ModelSpec::DecisionTree(TreeParams::default()),
            ModelKind::RandomForest => ModelSpec::RandomForest(ForestParams::default()),
            ModelKind::Svr => ModelSpec::Svr(SvrParams::default()),
        }
    }

    /// Fit this spec on the given rows. The seed only influences families
    /// with internal randomness.
    pub fn fit(&self, x: &[Vec<f64>], y: &[f64], seed: u64) -> Result<FittedParams> {
        match self {
            ModelSpec::Linear => Ok(FittedParams::Linear(LinearModel::fit(x, y)?)),
            ModelSpec::DecisionTree(p) => {
                Ok(FittedParams::DecisionTree(DecisionTree::fit(x, y, p)?))
            }
            ModelSpec::RandomForest(p) => {
                Ok(FittedParams::RandomForest(RandomForest::fit(x, y, p, seed)?))
            }
            ModelSpec::Svr(p) => Ok(FittedParams::Svr(SvrModel::fit(x, y, p)?)),
        }
    }

    /// Compact one-line rendering for reports and logs.
    pub fn describe(&self) -> String {
        match self {
            ModelSpec::Linear => "linear".into(),
            ModelSpec::DecisionTree(p) => format!(
                "decision-tree(max_depth={}, min_samples_leaf={})",
                p.max_depth
                    .map_or("none".to_string(), |d| d.to_string()),
                p.min_samples_leaf
            ),
            ModelSpec::RandomForest(p) => format!(
                "random-forest(n_estimators={}, max_features={}, bootstrap={})",
                p.n_estimators,
                p.max_features.map_or("all".to_string(), |k| k.to_string()),
                p.bootstrap
            ),
            ModelSpec::Svr(p) => format!("svr(c={}, gamma={})", p.c, p.gamma),
        }
    }
}

/// Fitted parameters of one regressor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FittedParams {
    Linear(LinearModel),
    DecisionTree(DecisionTree),
    RandomForest(RandomForest),
    Svr(SvrModel),
}

impl FittedParams {
    pub fn n_features(&self) -> usize {
        match self {
            FittedParams::Linear(m) => m.weights.len(),
            FittedParams::DecisionTree(m) => m.n_features,
            FittedParams::RandomForest(m) => m.n_features,
            FittedParams::Svr(m) => m.n_features,
        }
    }

    fn predict_one(&self, x: &[f64]) -> f64 {
        match self {
            FittedParams::Linear(m) => m.predict_one(x),
            FittedParams::DecisionTree(m) => m.predict_one(x),
            FittedParams::RandomForest(m) => m.predict_one(x),
            FittedParams::Svr(m) => m.predict_one(x),
        }
    }
}

/// Fit context recorded alongside a trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ModelMetadata {
    /// Seed the fit (and any cross-validation that chose it) ran under.
    pub seed: u64,
    /// Per-fold validation errors from the selection run, if one happened.
    pub fold_scores: Vec<f64>,
}

/// The persisted envelope: model choice, target, fitted parameters, and fit context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub spec: ModelSpec,
    pub target: Target,
    pub parameters: FittedParams,
    pub metadata: ModelMetadata,
}

impl TrainedModel {
    pub fn fit(
        spec: &ModelSpec,
        target: Target,
        x: &[Vec<f64>],
        y: &[f64],
        seed: u64,
    ) -> Result<TrainedModel> {
        let parameters = spec.fit(x, y, seed)?;
        Ok(TrainedModel {
            spec: *spec,
            target,
            parameters,
            metadata: ModelMetadata {
                seed,
                fold_scores: Vec::new(),
            },
        })
    }

    pub fn n_features(&self) -> usize {
        self.parameters.n_features()
    }

    pub fn predict_one(&self, x: &[f64]) -> Result<f64> {
        let want = self.n_features();
        if x.len() != want {
            return Err(Error::argument(format!(
                "model expects {want} features, got {}",
                x.len()
            )));
        }
        Ok(self.parameters.predict_one(x))
    }

    pub fn predict(&self, x: &[Vec<f64>]) -> Result<Vec<f64>> {
        x.iter().map(|row| self.predict_one(row)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<TrainedModel> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<TrainedModel> {
        TrainedModel::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn toy() -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let x: Vec<Vec<f64>> = (0..80)
            .map(|_| (0..5).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let y: Vec<f64> = x.iter().map(|r| r[0] + 0.5 * r[3] * r[3]).collect();
        (x, y)
    }

    #[test]
    fn every_family_fits_and_predicts() {
        let (x, y) = toy();
        for kind in ModelKind::ALL {
            let spec = ModelSpec::default_for(kind);
            assert_eq!(spec.kind(), kind);
            let model = TrainedModel::fit(&spec, Target::Force, &x, &y, 3).unwrap();
            assert_eq!(model.n_features(), 5);
            let preds = model.predict(&x).unwrap();
            assert_eq!(preds.len(), x.len());
            assert!(preds.iter().all(|p| p.is_finite()), "{kind:?}");
        }
    }

    #[test]
    fn predict_rejects_wrong_width() {
        let (x, y) = toy();
        let model =
            TrainedModel::fit(&ModelSpec::Linear, Target::Torque, &x, &y, 0).unwrap();
        assert!(model.predict_one(&[1.0, 2.0]).is_err());
        assert!(model.predict(&[vec![0.0; 5], vec![0.0; 4]]).is_err());
    }

    #[test]
    fn json_roundtrip_restores_bit_identical_predictions() {
        let (x, y) = toy();
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        let probes: Vec<Vec<f64>> = (0..50)
            .map(|_| (0..5).map(|_| rng.gen_range(-3.0..3.0)).collect())
            .collect();
        for kind in ModelKind::ALL {
            let spec = ModelSpec::default_for(kind);
            let model = TrainedModel::fit(&spec, Target::Force, &x, &y, 7).unwrap();
            let text = model.to_json().unwrap();
            let back = TrainedModel::from_json(&text).unwrap();
            assert_eq!(back, model, "{kind:?} envelope drifted");
            for probe in &probes {
                let a = model.predict_one(probe).unwrap();
                let b = back.predict_one(probe).unwrap();
                assert_eq!(a.to_bits(), b.to_bits(), "{kind:?} prediction drifted");
            }
        }
    }

    #[test]
    fn kind_labels_roundtrip_through_parsing() {
        for kind in ModelKind::ALL {
            let parsed: ModelKind = kind.label().parse().unwrap();
            assert_eq!(parsed, kind);
        }
        assert!("boosted-stumps".parse::<ModelKind>().is_err());
    }

    #[test]
    fn spec_json_carries_hyperparameters() {
        let spec = ModelSpec::Svr(SvrParams {
            c: 1000.0,
            gamma: 0.1,
            ..SvrParams::default()
        });
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"kind\":\"svr\""));
        let back: ModelSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}
