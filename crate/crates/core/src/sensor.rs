//! Synthetic model of a five-channel fiber-optic tactile finger.
//!
//! The finger embeds five optical fibers behind a soft contact face. When the
//! face deforms, each fiber's coupling changes and the electronics report a
//! per-channel attenuation in decibels,
//!
//! ```text
//! a = 10 * log10(i0 / i)
//! ```
//!
//! where `i0` is the launched intensity and `i` the received one. Deformation
//! increases coupling across the sensing cavity, so readings are zero on an
//! undeformed finger and drop below zero during contact.
//!
//! [`FingerPhysicalModel`] is a stand-in for the physical device: it maps a
//! contact (horizontal position, vertical position, feed depth) to the five
//! channel readings plus the ground-truth normal force and Z-torque at that
//! contact. The map is smooth, injective over the calibration grid, and
//! deterministic given the model seed, which makes it a reliable data source
//! for the calibration pipeline in [`crate::calibration`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding::{domain, subseed};

/// Number of optical channels in the finger.
pub const CHANNEL_COUNT: usize = 5;
/// Width of the contact face in millimeters. Horizontal position indices
/// 1..=10 map linearly onto this span.
pub const FACE_WIDTH_MM: f64 = 40.0;
/// Height of the contact face in millimeters, spanned by vertical indices.
pub const FACE_HEIGHT_MM: f64 = 40.0;
/// Smallest and largest valid position index (both axes).
pub const INDEX_MIN: f64 = 1.0;
pub const INDEX_MAX: f64 = 10.0;
/// Index of the horizontal centerline, where the contact torque vanishes.
pub const CENTER_INDEX: f64 = 5.5;
/// Maximum feed (indentation travel) in millimeters.
pub const MAX_FEED_MM: f64 = 10.0;
/// Saturation limits of the force and torque sensing range.
pub const MAX_FORCE_N: f64 = 6.0;
pub const MAX_TORQUE_NM: f64 = 0.05;

/// A launched/received intensity pair for one fiber.
///
/// Intensities are strictly positive; the constructor rejects anything else
/// so [`attenuation`] is total on constructed values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityPair {
    i0: f64,
    i: f64,
}

impl IntensityPair {
    pub fn new(i0: f64, i: f64) -> Result<Self> {
        if !(i0.is_finite() && i.is_finite()) || i0 <= 0.0 || i <= 0.0 {
            return Err(Error::domain(format!(
                "intensities must be finite and positive, got i0={i0}, i={i}"
            )));
        }
        Ok(IntensityPair { i0, i })
    }

    pub fn launched(&self) -> f64 {
        self.i0
    }

    pub fn received(&self) -> f64 {
        self.i
    }
}

/// Attenuation of one fiber in decibels: `10 * log10(i0 / i)`.
///
/// Equal intensities give exactly 0 dB; a received intensity one decade above
/// the launched one gives exactly -10 dB. Swapping the two intensities flips
/// the sign.
pub fn attenuation(pair: IntensityPair) -> f64 {
    10.0 * (pair.i0 / pair.i).log10()
}

/// One synchronous snapshot of all five channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelReading {
    /// Per-channel attenuation in dB.
    pub a: [f64; CHANNEL_COUNT],
    /// Sample index the reading was taken at (drives the noise stream).
    pub timestamp: u64,
}

/// A single validated contact on the finger face.
///
/// Values are only constructed through [`FingerPhysicalModel::contact`], which
/// enforces the calibrated envelope and fills in the ground-truth wrench, so a
/// `ContactState` always satisfies: positions inside `[1, 10]`, feed inside
/// `[0, 10]` mm, force inside `[0, 6]` N, torque inside `[-0.05, 0.05]` N*m,
/// and `f_n == 0` exactly when `feed == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactState {
    /// Horizontal contact position index (1..=10, continuous).
    pub p_index: f64,
    /// Vertical contact position index (1..=10, continuous).
    pub v_index: f64,
    /// Indentation depth in millimeters.
    pub feed_mm: f64,
    /// Ground-truth normal force in newtons.
    pub f_n: f64,
    /// Ground-truth Z-torque in newton meters.
    pub t_z: f64,
}

/// Sensitivity profile of one channel over the contact face.
///
/// The horizontal response is a Gaussian bump over a small baseline, so every
/// channel reacts to every contact position but reacts strongest near its own
/// fiber. The vertical response models fiber depth: a bounded modulation
/// between 0.55 and 1.0 centered on the channel's depth line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelProfile {
    /// Peak response in dB per unit of normalized feed.
    pub amplitude_db: f64,
    /// Horizontal center of the bump in millimeters.
    pub center_mm: f64,
    /// Horizontal standard deviation of the bump in millimeters.
    pub width_mm: f64,
    /// Floor of the horizontal response (fraction of the peak).
    pub baseline: f64,
    /// Vertical center of the depth modulation in millimeters.
    pub vertical_center_mm: f64,
    /// Vertical standard deviation of the depth modulation in millimeters.
    pub vertical_width_mm: f64,
}

impl ChannelProfile {
    fn validate(&self, k: usize) -> Result<()> {
        let ok = self.amplitude_db > 0.0
            && self.width_mm > 0.0
            && self.vertical_width_mm > 0.0
            && self.baseline > 0.0
            && (0.0..=FACE_WIDTH_MM).contains(&self.center_mm)
            && (0.0..=FACE_HEIGHT_MM).contains(&self.vertical_center_mm);
        if ok {
            Ok(())
        } else {
            Err(Error::argument(format!(
                "channel {k} profile has non-positive or out-of-face parameters"
            )))
        }
    }
}

/// Forward model of the finger: profiles, gains, noise and seed.
///
/// Serializes to and from JSON unchanged, so a model file fully pins the
/// synthetic data source of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerPhysicalModel {
    /// Per-channel sensitivity profiles.
    pub channels: [ChannelProfile; CHANNEL_COUNT],
    /// Normal force per millimeter of normalized feed, in N/mm.
    pub stiffness_n_per_mm: f64,
    /// Torque per newton of normal force and millimeter of centerline offset.
    pub torque_lever_nm_per_n_mm: f64,
    /// Standard deviation of additive Gaussian reading noise, in dB.
    pub noise_sigma_db: f64,
    /// Base seed of the model's noise stream.
    pub seed: u64,
}

impl FingerPhysicalModel {
    /// Default model used across the toolkit.
    ///
    /// Profile centers are deliberately asymmetric about the centerline so
    /// that mirrored contacts remain distinguishable on every channel, and
    /// vertical centers are staggered so constant-force contacts at different
    /// heights excite the channels in distinct ratios.
    pub fn default_with_seed(seed: u64) -> Self {
        let mk = |amplitude_db, center_mm, width_mm, vertical_center_mm| ChannelProfile {
            amplitude_db,
            center_mm,
            width_mm,
            baseline: 0.15,
            vertical_center_mm,
            vertical_width_mm: 14.0,
        };
        FingerPhysicalModel {
            channels: [
                mk(1.10, 5.0, 8.0, 10.0),
                mk(0.85, 13.0, 10.0, 15.0),
                mk(1.25, 19.0, 9.0, 20.0),
                mk(0.95, 27.0, 11.0, 25.0),
                mk(1.05, 34.0, 8.0, 30.0),
            ],
            stiffness_n_per_mm: 0.6,
            torque_lever_nm_per_n_mm: 4.0e-4,
            noise_sigma_db: 0.02,
            seed,
        }
    }

    /// Validate the parameter set; deserialized models must pass through this
    /// before use.
    pub fn validate(&self) -> Result<()> {
        for (k, ch) in self.channels.iter().enumerate() {
            ch.validate(k + 1)?;
        }
        for (k, ch) in self.channels.iter().enumerate() {
            for other in &self.channels[k + 1..] {
                if (ch.center_mm - other.center_mm).abs() < 1e-9 {
                    return Err(Error::argument(
                        "channel profiles must have distinct horizontal centers",
                    ));
                }
            }
        }
        if self.stiffness_n_per_mm <= 0.0 {
            return Err(Error::argument("stiffness must be positive"));
        }
        if self.torque_lever_nm_per_n_mm <= 0.0 {
            return Err(Error::argument("torque lever must be positive"));
        }
        if self.noise_sigma_db < 0.0 || !self.noise_sigma_db.is_finite() {
            return Err(Error::argument("noise sigma must be finite and >= 0"));
        }
        Ok(())
    }

    /// Build a validated contact, computing its ground-truth wrench.
    ///
    /// Errors if the contact lies outside the calibrated envelope.
    pub fn contact(&self, p_index: f64, v_index: f64, feed_mm: f64) -> Result<ContactState> {
        if !(INDEX_MIN..=INDEX_MAX).contains(&p_index) || !p_index.is_finite() {
            return Err(Error::domain(format!(
                "horizontal index {p_index} outside [{INDEX_MIN}, {INDEX_MAX}]"
            )));
        }
        if !(INDEX_MIN..=INDEX_MAX).contains(&v_index) || !v_index.is_finite() {
            return Err(Error::domain(format!(
                "vertical index {v_index} outside [{INDEX_MIN}, {INDEX_MAX}]"
            )));
        }
        if !(0.0..=MAX_FEED_MM).contains(&feed_mm) || !feed_mm.is_finite() {
            return Err(Error::domain(format!(
                "feed {feed_mm} mm outside [0, {MAX_FEED_MM}]"
            )));
        }
        let mut state = ContactState {
            p_index,
            v_index,
            feed_mm,
            f_n: 0.0,
            t_z: 0.0,
        };
        let (f_n, t_z) = self.ground_truth_wrench(&state);
        state.f_n = f_n;
        state.t_z = t_z;
        Ok(state)
    }

    /// Ground-truth `(f_n, t_z)` for a contact.
    ///
    /// The force follows the indentation law `stiffness * g(feed)` clamped to
    /// the sensing range; the torque is the force times the lever arm from the
    /// horizontal centerline, negative left of center and positive right.
    pub fn ground_truth_wrench(&self, contact: &ContactState) -> (f64, f64) {
        let f_n = (self.stiffness_n_per_mm * g(contact.feed_mm)).clamp(0.0, MAX_FORCE_N);
        let offset_mm = horizontal_mm(contact.p_index) - FACE_WIDTH_MM / 2.0;
        let t_z = (self.torque_lever_nm_per_n_mm * f_n * offset_mm)
            .clamp(-MAX_TORQUE_NM, MAX_TORQUE_NM);
        (f_n, t_z)
    }

    /// Read all five channels at a contact.
    ///
    /// Channel `k` returns `-(sensitivity_k(p, v) * g(feed))` plus Gaussian
    /// noise, so an undeformed finger reads zero on every channel up to the
    /// noise sigma and readings are non-positive during interaction (up to
    /// that same noise). The noise stream is derived from the model seed and
    /// `sample_index`, which makes the whole call a pure function of its
    /// arguments; with `noise_sigma_db == 0` no generator is touched at all.
    pub fn sense(&self, contact: &ContactState, sample_index: u64) -> ChannelReading {
        let depth = g(contact.feed_mm);
        let mut a = [0.0; CHANNEL_COUNT];
        for (k, slot) in a.iter_mut().enumerate() {
            *slot = -(self.sensitivity(k, contact.p_index, contact.v_index) * depth);
        }
        if self.noise_sigma_db > 0.0 {
            let stream = subseed(self.seed, domain::SENSOR_NOISE) ^ sample_index;
            let mut rng = ChaCha8Rng::seed_from_u64(subseed(stream, domain::SENSOR_NOISE));
            let normal = Normal::new(0.0, self.noise_sigma_db).expect("validated sigma");
            for slot in a.iter_mut() {
                *slot += normal.sample(&mut rng);
            }
        }
        ChannelReading {
            a,
            timestamp: sample_index,
        }
    }

    /// Response of channel `k` at a face position, in dB per unit of
    /// normalized feed. Strictly positive everywhere on the face.
    fn sensitivity(&self, k: usize, p_index: f64, v_index: f64) -> f64 {
        let ch = &self.channels[k];
        let x = horizontal_mm(p_index);
        let y = vertical_mm(v_index);
        let dx = (x - ch.center_mm) / ch.width_mm;
        let horizontal = ch.baseline + (-0.5 * dx * dx).exp();
        let dy = (y - ch.vertical_center_mm) / ch.vertical_width_mm;
        let vertical = 0.55 + 0.45 * (-0.5 * dy * dy).exp();
        ch.amplitude_db * horizontal * vertical
    }

    /// Invert the indentation law: find the feed that produces `target_n`
    /// newtons of normal force, by bisection on the (strictly increasing)
    /// force curve. Errors if the target is outside what the finger can
    /// produce within its travel.
    pub fn solve_feed_for_force(&self, target_n: f64) -> Result<f64> {
        if !target_n.is_finite() || target_n < 0.0 {
            return Err(Error::protocol(format!(
                "target force {target_n} N must be finite and >= 0"
            )));
        }
        if target_n == 0.0 {
            return Ok(0.0);
        }
        let force_at = |feed: f64| (self.stiffness_n_per_mm * g(feed)).min(MAX_FORCE_N);
        let max_force = force_at(MAX_FEED_MM);
        if target_n > max_force {
            return Err(Error::protocol(format!(
                "target force {target_n} N exceeds the {max_force} N reachable within travel"
            )));
        }
        let (mut lo, mut hi) = (0.0_f64, MAX_FEED_MM);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if force_at(mid) < target_n {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: FingerPhysicalModel = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }
}

/// Normalized indentation response: `feed * (1 + 0.05 * feed) / 1.5`.
///
/// Strictly increasing, mildly superlinear (deeper contact recruits more of
/// the soft face), with `g(0) = 0` and `g(10) = 10` so full travel maps onto
/// the full sensing range.
pub fn g(feed_mm: f64) -> f64 {
    feed_mm * (1.0 + 0.05 * feed_mm) / 1.5
}

/// Horizontal index to millimeters across the face: 1 maps to 0 mm, 10 to
/// the full width.
pub fn horizontal_mm(p_index: f64) -> f64 {
    (p_index - INDEX_MIN) / (INDEX_MAX - INDEX_MIN) * FACE_WIDTH_MM
}

/// Vertical index to millimeters, same convention as [`horizontal_mm`].
pub fn vertical_mm(v_index: f64) -> f64 {
    (v_index - INDEX_MIN) / (INDEX_MAX - INDEX_MIN) * FACE_HEIGHT_MM
}
