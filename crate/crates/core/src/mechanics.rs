//! Quasi-static contact mechanics for a planar three-finger grasp.
//!
//! Conventions: each contact carries its wrench in a local frame whose X axis
//! is the inward contact normal, Y the in-plane tangential direction, and Z
//! the out-of-plane (vertical) direction. The grasp plane is horizontal;
//! object weight is neglected against the actuation forces, and the carried
//! Y-torque is reported but excluded from the planar balance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when checking stored resultants and baselines.
const CONSISTENCY_TOL: f64 = 1e-12;

/// The wrench transmitted through one soft-finger contact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactWrench {
    /// Normal force along the inward contact normal, in N. Non-negative
    /// while the finger stays in contact.
    pub f_x: f64,
    /// In-plane tangential force, in N.
    pub f_y: f64,
    /// Out-of-plane (vertical) tangential force, in N.
    pub f_z: f64,
    /// Twist torque about the contact normal's plane axis, in N*m.
    pub t_z: f64,
    /// Carried torque about the Y axis, in N*m (not part of the balance).
    pub t_y: f64,
    /// Coulomb friction coefficient at the contact. Zero models a
    /// frictionless contact.
    pub mu: f64,
    /// Sliding speed magnitude. The static friction law only applies at rest.
    pub v: f64,
}

impl ContactWrench {
    pub fn new(f_x: f64, f_y: f64, f_z: f64, t_z: f64, t_y: f64, mu: f64, v: f64) -> Result<Self> {
        let w = ContactWrench {
            f_x,
            f_y,
            f_z,
            t_z,
            t_y,
            mu,
            v,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.f_x, self.f_y, self.f_z, self.t_z, self.t_y, self.mu, self.v];
        if parts.iter().any(|p| !p.is_finite()) {
            return Err(Error::argument("contact wrench components must be finite"));
        }
        if self.f_x < 0.0 {
            return Err(Error::argument("normal force must be >= 0 in contact"));
        }
        if self.mu < 0.0 {
            return Err(Error::argument("friction coefficient must be >= 0"));
        }
        if self.v < 0.0 {
            return Err(Error::argument("sliding speed must be >= 0"));
        }
        Ok(())
    }

    /// Magnitude of the total tangential force.
    pub fn tangential(&self) -> f64 {
        self.f_y.hypot(self.f_z)
    }
}

/// Static Coulomb check: the contact holds without sliding if it is at rest
/// and the tangential force stays inside the friction cone,
/// `||(f_y, f_z)|| <= mu * f_x`.
pub fn coulomb_satisfied(w: &ContactWrench) -> bool {
    w.v == 0.0 && w.tangential() <= w.mu * w.f_x
}

/// A contact patch discretized into point forces.
///
/// The constructor sums the point forces into the stored resultant, so the
/// consistency invariant holds by construction; [`ContactPatch::is_consistent`]
/// re-checks it for values that crossed a serialization boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactPatch {
    /// Point forces (f_x, f_y, f_z) across the patch.
    pub components: Vec<[f64; 3]>,
    /// Resultant wrench of the whole patch.
    pub resultant: ContactWrench,
}

impl ContactPatch {
    /// Build a patch from its point forces plus the torques, friction and
    /// sliding state of the resultant.
    pub fn new(components: Vec<[f64; 3]>, t_z: f64, t_y: f64, mu: f64, v: f64) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::argument("a contact patch needs at least one force"));
        }
        let mut sum = [0.0_f64; 3];
        for f in &components {
            if f.iter().any(|c| !c.is_finite()) {
                return Err(Error::argument("patch forces must be finite"));
            }
            sum[0] += f[0];
            sum[1] += f[1];
            sum[2] += f[2];
        }
        let resultant = ContactWrench::new(sum[0], sum[1], sum[2], t_z, t_y, mu, v)?;
        Ok(ContactPatch {
            components,
            resultant,
        })
    }

    /// Does the stored resultant still equal the sum of the point forces?
    pub fn is_consistent(&self) -> bool {
        let mut sum = [0.0_f64; 3];
        for f in &self.components {
            sum[0] += f[0];
            sum[1] += f[1];
            sum[2] += f[2];
        }
        let scale = sum
            .iter()
            .map(|c| c.abs())
            .fold(1.0_f64, f64::max);
        (sum[0] - self.resultant.f_x).abs() <= CONSISTENCY_TOL * scale
            && (sum[1] - self.resultant.f_y).abs() <= CONSISTENCY_TOL * scale
            && (sum[2] - self.resultant.f_z).abs() <= CONSISTENCY_TOL * scale
    }
}

/// A full three-finger grasp state for the planar balance equations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraspScene {
    /// Contact wrenches of fingers 1..=3, each in its local contact frame.
    pub contacts: [ContactWrench; 3],
    /// World heading of each contact's inward normal, in radians.
    pub normal_dirs_rad: [f64; 3],
    /// External planar force on the object, in N.
    pub f_ext: [f64; 2],
    /// External Z-torque on the object, in N*m.
    pub t_ext: f64,
    /// Actuation force magnitude each finger presses with, in N.
    pub f_t: f64,
    /// Baseline (pre-disturbance) normal force magnitudes, in N.
    pub baseline_normal_n: [f64; 3],
    /// Baseline (pre-disturbance) in-plane tangential forces, signed, in N.
    pub baseline_tangential_n: [f64; 3],
}

impl GraspScene {
    pub fn validate(&self) -> Result<()> {
        for c in &self.contacts {
            c.validate()?;
        }
        let scalars = self
            .normal_dirs_rad
            .iter()
            .chain(self.f_ext.iter())
            .chain([&self.t_ext, &self.f_t])
            .chain(self.baseline_normal_n.iter())
            .chain(self.baseline_tangential_n.iter());
        for s in scalars {
            if !s.is_finite() {
                return Err(Error::argument("grasp scene fields must be finite"));
            }
        }
        if self.f_t <= 0.0 {
            return Err(Error::argument("actuation force must be positive"));
        }
        if self.baseline_normal_n.iter().any(|&n| n < 0.0) {
            return Err(Error::argument("baseline normal forces must be >= 0"));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scene: GraspScene = serde_json::from_str(text)?;
        scene.validate()?;
        Ok(scene)
    }
}

fn rot(theta: f64, v: [f64; 2]) -> [f64; 2] {
    let (s, c) = theta.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

/// Planar equilibrium residuals of a grasp scene.
///
/// Returns the force residual `sum_i F_n,i + sum_i F_t,i + F_ext` as a world
/// 2-vector together with the torque residual `sum_i t_z,i + t_ext`. A scene
/// in equilibrium returns zeros.
pub fn equilibrium_residual(scene: &GraspScene) -> ([f64; 2], f64) {
    let mut force = scene.f_ext;
    let mut torque = scene.t_ext;
    for (w, &dir) in scene.contacts.iter().zip(&scene.normal_dirs_rad) {
        let world = rot(dir, [w.f_x, w.f_y]);
        force[0] += world[0];
        force[1] += world[1];
        torque += w.t_z;
    }
    (force, torque)
}

/// Anti-disturbance capacity of the grasp: how much tangential reserve the
/// friction cones hold beyond what the baseline grasp already spends,
/// `sum_i mu_i * F_n,i - sum_i |F_t0,i|`.
///
/// Requires the baseline to be self-balanced (its normal and tangential
/// forces cancel as world vectors); a disturbed baseline would make the
/// reserve meaningless. Errors on that, or on a negative normal force.
pub fn anti_disturbance(scene: &GraspScene) -> Result<f64> {
    scene.validate()?;
    let mut baseline_sum = [0.0_f64; 2];
    let mut magnitude = 0.0_f64;
    for i in 0..3 {
        let n_dir = [scene.normal_dirs_rad[i].cos(), scene.normal_dirs_rad[i].sin()];
        let t_dir = [-n_dir[1], n_dir[0]];
        baseline_sum[0] += scene.baseline_normal_n[i] * n_dir[0] + scene.baseline_tangential_n[i] * t_dir[0];
        baseline_sum[1] += scene.baseline_normal_n[i] * n_dir[1] + scene.baseline_tangential_n[i] * t_dir[1];
        magnitude += scene.baseline_normal_n[i].abs() + scene.baseline_tangential_n[i].abs();
    }
    let tol = 1e-9 * magnitude.max(1.0);
    if baseline_sum[0].hypot(baseline_sum[1]) > tol {
        return Err(Error::argument(
            "baseline forces are not in planar balance",
        ));
    }
    let mut capacity = 0.0;
    for (w, &t0) in scene.contacts.iter().zip(&scene.baseline_tangential_n) {
        capacity += w.mu * w.f_x - t0.abs();
    }
    Ok(capacity)
}

/// Split a pressing force into its surface-frame components when the press
/// axis is misaligned from the contact normal by `theta`:
/// `f_n = f_t * cos(theta)`, tangential `f_t * sin(theta)`.
///
/// `theta` is the misalignment magnitude and must lie in `[0, pi/2)`; the
/// force must be positive.
pub fn decompose_actuator_force(f_t: f64, theta: f64) -> Result<(f64, f64)> {
    if !(f_t.is_finite() && f_t > 0.0) {
        return Err(Error::argument(format!(
            "actuation force must be positive, got {f_t}"
        )));
    }
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&theta) {
        return Err(Error::argument(format!(
            "misalignment {theta} rad outside [0, pi/2)"
        )));
    }
    Ok((f_t * theta.cos(), f_t * theta.sin()))
}

/// Scene with three identical radial contacts spaced 120 degrees apart, no
/// external load. Useful as a known-balanced starting point.
pub fn symmetric_scene(f_n: f64, mu: f64, f_t: f64) -> Result<GraspScene> {
    let dirs = [
        -std::f64::consts::FRAC_PI_2,
        std::f64::consts::FRAC_PI_6,
        std::f64::consts::PI - std::f64::consts::FRAC_PI_6,
    ];
    let w = ContactWrench::new(f_n, 0.0, 0.0, 0.0, 0.0, mu, 0.0)?;
    let scene = GraspScene {
        contacts: [w, w, w],
        normal_dirs_rad: dirs,
        f_ext: [0.0, 0.0],
        t_ext: 0.0,
        f_t,
        baseline_normal_n: [f_n; 3],
        baseline_tangential_n: [0.0; 3],
    };
    scene.validate()?;
    Ok(scene)
}
