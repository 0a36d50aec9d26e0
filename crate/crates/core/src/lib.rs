//! Core library of the fibergrip project: a physics model of an
//! optoelectronic tactile finger, dataset generation and calibration
//! (regressors, cross-validation, feature ablation), a torque-nulling grasp
//! controller, planar grasp mechanics, and a quasi-static simulation that
//! compares conventional against torque-aware grasping.
//!
//! Everything is deterministic given the seeds carried in the inputs; no
//! global state, no system entropy.

pub mod calibration;
pub mod controller;
pub mod error;
pub mod mechanics;
pub mod seeding;
pub mod sensor;
pub mod sim;
pub mod text;

pub use error::{Error, Result};
pub use sensor::{attenuation, ContactState, FingerPhysicalModel, IntensityPair, CHANNEL_COUNT};
