//! Run configuration: one JSON file, overridable from the command line.
//!
//! Every knob a command consumes lives here, so a run is fully described by
//! `(config, seed)` and can be reproduced byte-for-byte. Unknown top-level
//! keys are rejected to catch typos in `--set` paths early.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use fibergrip_core::calibration::{ModelKind, Protocol, VerticalProtocol};
use fibergrip_core::controller::ControllerParams;
use fibergrip_core::sensor::FingerPhysicalModel;
use fibergrip_core::sim::{default_object_suite, GripperSpec, ObjectShape, DEFAULT_K_TWIST};

/// File locations, all relative to the output directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub dataset: PathBuf,
    pub vertical_dataset: PathBuf,
    pub model_dir: PathBuf,
    pub report_dir: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Paths {
            dataset: "dataset.csv".into(),
            vertical_dataset: "vertical.csv".into(),
            model_dir: "models".into(),
            report_dir: "reports".into(),
        }
    }
}

/// Adjustable sensor-model parameters; everything else is the finger's
/// physical identity and stays fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SensorOverrides {
    /// Per-channel reading noise, dB. `None` keeps the default.
    pub noise_sigma_db: Option<f64>,
}

/// Which model family the ablation ladder refits at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AblationConfig {
    pub family: ModelKind,
}

impl Default for AblationConfig {
    fn default() -> Self {
        AblationConfig {
            family: ModelKind::RandomForest,
        }
    }
}

/// Streaming-prediction parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StreamConfig {
    /// Number of sensing ticks to replay.
    pub ticks: u32,
}

impl Default for StreamConfig {
    fn default() -> Self {
        StreamConfig { ticks: 500 }
    }
}

/// Grasp-simulation scene set and gains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraspConfig {
    pub gripper: GripperSpec,
    /// Soft-finger twist gain, N*m per (rad * N).
    pub k_twist: f64,
    /// Objects to grasp; defaults to the four-object benchmark suite.
    pub objects: Vec<ObjectShape>,
    /// Also render the comparison as an SVG bar chart.
    pub svg: bool,
}

impl Default for GraspConfig {
    fn default() -> Self {
        GraspConfig {
            gripper: GripperSpec::default(),
            k_twist: DEFAULT_K_TWIST,
            objects: default_object_suite(),
            svg: true,
        }
    }
}

/// The complete run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed. Mandatory for every command that draws random numbers.
    pub seed: Option<u64>,
    /// Base directory all `paths` entries resolve against.
    pub out_dir: PathBuf,
    pub paths: Paths,
    pub sensor: SensorOverrides,
    /// Main data-collection protocol (horizontal sweep, random feeds).
    pub protocol: Protocol,
    /// Constant-force vertical-sweep protocol.
    pub vertical: VerticalProtocol,
    /// Folds for cross-validated model selection.
    pub cv_folds: usize,
    /// Model families entered into grid searches.
    pub families: Vec<ModelKind>,
    pub ablation: AblationConfig,
    pub stream: StreamConfig,
    pub controller: ControllerParams,
    pub grasp: GraspConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: None,
            out_dir: ".".into(),
            paths: Paths::default(),
            sensor: SensorOverrides::default(),
            protocol: Protocol::default(),
            vertical: VerticalProtocol::default(),
            cv_folds: 5,
            families: ModelKind::ALL.to_vec(),
            ablation: AblationConfig::default(),
            stream: StreamConfig::default(),
            controller: ControllerParams::default(),
            grasp: GraspConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn dataset_path(&self) -> PathBuf {
        self.out_dir.join(&self.paths.dataset)
    }

    pub fn vertical_dataset_path(&self) -> PathBuf {
        self.out_dir.join(&self.paths.vertical_dataset)
    }

    pub fn model_dir(&self) -> PathBuf {
        self.out_dir.join(&self.paths.model_dir)
    }

    pub fn report_dir(&self) -> PathBuf {
        self.out_dir.join(&self.paths.report_dir)
    }

    /// The seed, or a refusal for commands that cannot run without one.
    pub fn require_seed(&self) -> Result<u64> {
        self.seed.context(
            "this command is randomized and refuses to run without an explicit seed; \
             pass --seed N or set \"seed\" in the config file",
        )
    }

    /// The sensor's forward model under this configuration.
    pub fn sensor_model(&self, seed: u64) -> FingerPhysicalModel {
        let mut model = FingerPhysicalModel::default_with_seed(seed);
        if let Some(sigma) = self.sensor.noise_sigma_db {
            model.noise_sigma_db = sigma;
        }
        model
    }

    pub fn validate(&self) -> Result<()> {
        if self.cv_folds < 2 {
            bail!("cv_folds must be at least 2, got {}", self.cv_folds);
        }
        if self.families.is_empty() {
            bail!("at least one model family must be enabled");
        }
        if let Some(sigma) = self.sensor.noise_sigma_db {
            if !(sigma.is_finite() && sigma >= 0.0) {
                bail!("sensor noise sigma must be finite and >= 0, got {sigma}");
            }
        }
        Ok(())
    }
}

/// Apply one `key=value` override onto the raw JSON tree. Keys are dotted
/// paths of object fields; values are parsed as JSON when possible and fall
/// back to plain strings (so `--set paths.dataset=d.csv` needs no quoting).
fn apply_set(root: &mut Value, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .with_context(|| format!("override '{spec}' is not of the form key=value"))?;
    if key.is_empty() {
        bail!("override '{spec}' has an empty key");
    }
    let value: Value = serde_json::from_str(raw).unwrap_or(Value::String(raw.to_string()));
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for part in &parts[..parts.len() - 1] {
        if !node.is_object() {
            *node = Value::Object(serde_json::Map::new());
        }
        node = node
            .as_object_mut()
            .unwrap()
            .entry(part.to_string())
            .or_insert(Value::Object(serde_json::Map::new()));
    }
    if !node.is_object() {
        *node = Value::Object(serde_json::Map::new());
    }
    node.as_object_mut()
        .unwrap()
        .insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

/// Load the configuration: file (if any), then `--set` overrides, then the
/// dedicated `--seed` / `--out` flags.
pub fn load_config(
    file: Option<&Path>,
    sets: &[String],
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<RunConfig> {
    let mut tree: Value = match file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config file {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("config file {} is not valid JSON", path.display()))?
        }
        None => Value::Object(serde_json::Map::new()),
    };
    for spec in sets {
        apply_set(&mut tree, spec)?;
    }
    let mut config: RunConfig =
        serde_json::from_value(tree).context("configuration does not match the expected schema")?;
    if let Some(s) = seed {
        config.seed = Some(s);
    }
    if let Some(o) = out {
        config.out_dir = o.to_path_buf();
    }
    config.validate()?;
    Ok(config)
}
