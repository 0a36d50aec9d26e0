//! Planar quasi-static simulation of the three-finger gripper.
//!
//! Objects are convex cross-sections on a table; fingers press along rays
//! from bases on a mounting circle. Each contact decomposes the constant
//! actuator force into a surface-normal and a tangential component with a
//! misalignment-proportional twist torque — which is exactly the signal the
//! closed-loop reorientation controller nulls. Grasp robustness is the
//! largest vertical (out-of-plane) pull the friction cones can still resist.
//!
//! All routines are pure functions of their inputs; two runs with the same
//! scene produce identical outcomes.

pub mod geometry;

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::controller::{optimize_grasp, ControllerParams, FingerState, OptimizationTrace};
use crate::error::{Error, Result};
use crate::mechanics::{decompose_actuator_force, ContactWrench};
use crate::text::fmt_sig9;

use geometry::{add, cross, dot, ray_circle, ray_rect, rotate, scale, unit, Hit, Vec2};

/// Radius of the circle the finger bases are mounted on, mm.
pub const MOUNT_RADIUS_MM: f64 = 80.0;

/// Default friction coefficient of the object suite.
pub const DEFAULT_MU: f64 = 0.6;

/// Default per-finger actuator force, N. Chosen so the fully aligned
/// three-finger grasp resists exactly 13 N of vertical pull at the default
/// friction: 3 * mu * F_T = 13.
pub const DEFAULT_F_T: f64 = 13.0 / (3.0 * DEFAULT_MU);

/// Default soft-finger twist gain, N*m of Z-torque per (rad * N).
///
/// Sized so the torque feedback loop is a contraction at the default
/// controller gains: the loop gain is gamma * deg_per_tick * (pi/180) *
/// k_twist * F_T ~ 0.89 < 1, which makes the misalignment decay
/// monotonically (no overshoot, so a finger never slides off its face), and
/// so simulated torques at realistic misalignments stay inside the +-0.05
/// N*m envelope the sensing stack is calibrated for.
pub const DEFAULT_K_TWIST: f64 = 0.008;

fn default_k_twist() -> f64 {
    DEFAULT_K_TWIST
}

fn default_f_t() -> f64 {
    DEFAULT_F_T
}

/// Object identity for reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectKind {
    Sphere,
    Cube,
    Cuboid,
    Cylinder,
}

impl ObjectKind {
    pub fn label(self) -> &'static str {
        match self {
            ObjectKind::Sphere => "sphere",
            ObjectKind::Cube => "cube",
            ObjectKind::Cuboid => "cuboid",
            ObjectKind::Cylinder => "cylinder",
        }
    }
}

/// Convex planar cross-section, in the object's local frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossSection {
    Circle { radius: f64 },
    Rect { half_w: f64, half_h: f64 },
}

/// Planar pose: position of the section center plus rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    pub rot_deg: f64,
}

/// An object on the table, as seen in the grasp plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectShape {
    pub kind: ObjectKind,
    pub dims: CrossSection,
    #[serde(default)]
    pub pose: Pose2,
    #[serde(default = "default_mu")]
    pub mu: f64,
}

fn default_mu() -> f64 {
    DEFAULT_MU
}

impl ObjectShape {
    pub fn sphere(radius: f64) -> ObjectShape {
        ObjectShape {
            kind: ObjectKind::Sphere,
            dims: CrossSection::Circle { radius },
            pose: Pose2::default(),
            mu: DEFAULT_MU,
        }
    }

    pub fn cube(side: f64) -> ObjectShape {
        ObjectShape {
            kind: ObjectKind::Cube,
            dims: CrossSection::Rect {
                half_w: side / 2.0,
                half_h: side / 2.0,
            },
            pose: Pose2::default(),
            mu: DEFAULT_MU,
        }
    }

    pub fn cuboid(width: f64, height: f64) -> ObjectShape {
        ObjectShape {
            kind: ObjectKind::Cuboid,
            dims: CrossSection::Rect {
                half_w: width / 2.0,
                half_h: height / 2.0,
            },
            pose: Pose2::default(),
            mu: DEFAULT_MU,
        }
    }

    /// A cylinder lying on the table with its axis in the grasp plane: the
    /// plane sees a diameter-by-length rectangle, long side along local +y.
    pub fn cylinder(diameter: f64, length: f64) -> ObjectShape {
        ObjectShape {
            kind: ObjectKind::Cylinder,
            dims: CrossSection::Rect {
                half_w: diameter / 2.0,
                half_h: length / 2.0,
            },
            pose: Pose2::default(),
            mu: DEFAULT_MU,
        }
    }

    pub fn with_pose(mut self, x: f64, y: f64, rot_deg: f64) -> ObjectShape {
        self.pose = Pose2 { x, y, rot_deg };
        self
    }

    pub fn with_mu(mut self, mu: f64) -> ObjectShape {
        self.mu = mu;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let dims_ok = match self.dims {
            CrossSection::Circle { radius } => radius.is_finite() && radius > 0.0,
            CrossSection::Rect { half_w, half_h } => {
                half_w.is_finite() && half_w > 0.0 && half_h.is_finite() && half_h > 0.0
            }
        };
        if !dims_ok {
            return Err(Error::argument("object dimensions must be finite and positive"));
        }
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return Err(Error::argument("friction coefficient must be finite and >= 0"));
        }
        if ![self.pose.x, self.pose.y, self.pose.rot_deg]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::argument("object pose must be finite"));
        }
        Ok(())
    }

    fn intersect(&self, origin: Vec2, dir: Vec2) -> Option<Hit> {
        let center = [self.pose.x, self.pose.y];
        match self.dims {
            CrossSection::Circle { radius } => ray_circle(origin, dir, center, radius),
            CrossSection::Rect { half_w, half_h } => ray_rect(
                origin,
                dir,
                center,
                self.pose.rot_deg.to_radians(),
                half_w,
                half_h,
            ),
        }
    }

    /// The same object rotated (about the world origin) and translated —
    /// used by frame-indifference checks.
    pub fn transformed(&self, rot_rad: f64, shift: Vec2) -> ObjectShape {
        let mut out = *self;
        let center = rotate([self.pose.x, self.pose.y], rot_rad);
        out.pose = Pose2 {
            x: center[0] + shift[0],
            y: center[1] + shift[1],
            rot_deg: self.pose.rot_deg + rot_rad.to_degrees(),
        };
        out
    }

    /// The object mirrored across the world Y axis.
    pub fn mirrored(&self) -> ObjectShape {
        let mut out = *self;
        out.pose = Pose2 {
            x: -self.pose.x,
            y: self.pose.y,
            rot_deg: -self.pose.rot_deg,
        };
        out
    }
}

/// Named finger arrangements of the reconfigurable gripper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GripMode {
    Circular,
    Lateral,
    Parallel,
}

/// One finger: a base point and the pressing direction at zero joint angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FingerPlacement {
    pub base: Vec2,
    pub press_dir_rad: f64,
}

/// A complete gripper posture: placements, joint angles, actuator force.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GripperConfig {
    pub mode: GripMode,
    pub fingers: [FingerPlacement; 3],
    /// Joint angle of each finger, degrees, added to its pressing direction.
    pub thetas_deg: [f64; 3],
    /// Actuator force per finger, N.
    pub f_t: f64,
}

fn on_ring(angle_deg: f64, radius: f64) -> Vec2 {
    scale(unit(angle_deg.to_radians()), radius)
}

impl GripperConfig {
    /// Three fingers at 120 degree spacing, each pressing at the center.
    pub fn circular(radius: f64, f_t: f64) -> GripperConfig {
        let place = |base_deg: f64| FingerPlacement {
            base: on_ring(base_deg, radius),
            press_dir_rad: (base_deg + 180.0).to_radians(),
        };
        GripperConfig {
            mode: GripMode::Circular,
            fingers: [place(90.0), place(210.0), place(330.0)],
            thetas_deg: [0.0; 3],
            f_t,
        }
    }

    /// Two parallel fingers pressing one way, a third opposing them.
    pub fn parallel(radius: f64, f_t: f64) -> GripperConfig {
        GripperConfig {
            mode: GripMode::Parallel,
            fingers: [
                FingerPlacement {
                    base: on_ring(150.0, radius),
                    press_dir_rad: 0.0,
                },
                FingerPlacement {
                    base: on_ring(210.0, radius),
                    press_dir_rad: 0.0,
                },
                FingerPlacement {
                    base: on_ring(0.0, radius),
                    press_dir_rad: std::f64::consts::PI,
                },
            ],
            thetas_deg: [0.0; 3],
            f_t,
        }
    }

    /// Two symmetric opposing fingers plus one on their mid-plane.
    pub fn lateral(radius: f64, f_t: f64) -> GripperConfig {
        GripperConfig {
            mode: GripMode::Lateral,
            fingers: [
                FingerPlacement {
                    base: on_ring(90.0, radius),
                    press_dir_rad: -std::f64::consts::FRAC_PI_2,
                },
                FingerPlacement {
                    base: on_ring(270.0, radius),
                    press_dir_rad: std::f64::consts::FRAC_PI_2,
                },
                FingerPlacement {
                    base: on_ring(180.0, radius),
                    press_dir_rad: 0.0,
                },
            ],
            thetas_deg: [0.0; 3],
            f_t,
        }
    }

    pub fn for_mode(mode: GripMode, radius: f64, f_t: f64) -> GripperConfig {
        match mode {
            GripMode::Circular => GripperConfig::circular(radius, f_t),
            GripMode::Parallel => GripperConfig::parallel(radius, f_t),
            GripMode::Lateral => GripperConfig::lateral(radius, f_t),
        }
    }

    pub fn with_thetas(mut self, thetas_deg: [f64; 3]) -> GripperConfig {
        self.thetas_deg = thetas_deg;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_t.is_finite() && self.f_t > 0.0) {
            return Err(Error::argument("actuator force must be finite and positive"));
        }
        for f in &self.fingers {
            if !(f.base[0].is_finite() && f.base[1].is_finite() && f.press_dir_rad.is_finite()) {
                return Err(Error::argument("finger placement must be finite"));
            }
        }
        if self.thetas_deg.iter().any(|t| !t.is_finite()) {
            return Err(Error::argument("joint angles must be finite"));
        }
        for i in 0..3 {
            for j in i + 1..3 {
                let d = geometry::sub(self.fingers[i].base, self.fingers[j].base);
                if dot(d, d) == 0.0 {
                    return Err(Error::argument("finger bases must be distinct"));
                }
            }
        }
        Ok(())
    }

    /// World-frame press ray of finger `i` under its current joint angle.
    pub fn ray_of(&self, i: usize) -> (Vec2, Vec2) {
        let f = &self.fingers[i];
        let dir = unit(f.press_dir_rad + self.thetas_deg[i].to_radians());
        (f.base, dir)
    }

    /// The whole gripper rotated about the origin and translated — used by
    /// frame-indifference checks.
    pub fn transformed(&self, rot_rad: f64, shift: Vec2) -> GripperConfig {
        let mut out = *self;
        for f in &mut out.fingers {
            f.base = add(rotate(f.base, rot_rad), shift);
            f.press_dir_rad += rot_rad;
        }
        out
    }

    /// The gripper mirrored across the world Y axis, finger order preserved,
    /// so finger i of the mirror corresponds to finger i of the original.
    pub fn mirrored(&self) -> GripperConfig {
        let mut out = *self;
        for (i, f) in out.fingers.iter_mut().enumerate() {
            f.base = [-f.base[0], f.base[1]];
            f.press_dir_rad = std::f64::consts::PI - f.press_dir_rad;
            out.thetas_deg[i] = -self.thetas_deg[i];
        }
        out
    }
}

/// One resolved finger-object contact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FingerContact {
    /// Contact point, world frame, mm.
    pub point: Vec2,
    /// Direction of the inward surface normal (the ideal pressing
    /// direction), radians.
    pub normal_dir_rad: f64,
    /// Signed angle from the inward normal to the actual pressing direction,
    /// radians.
    pub misalign_rad: f64,
    /// Decomposed actuator force at the contact: normal along `f_x`,
    /// in-plane tangential along `f_y`.
    pub wrench: ContactWrench,
    /// Soft-finger twist torque, N*m, signed by the misalignment side.
    pub t_z_nm: f64,
}

/// Resolve all three contacts of a closed gripper. Fails with a contact-miss
/// error naming the first finger whose ray does not reach the object.
pub fn contact_solve(
    config: &GripperConfig,
    object: &ObjectShape,
    k_twist: f64,
) -> Result<[FingerContact; 3]> {
    config.validate()?;
    object.validate()?;
    if !(k_twist.is_finite() && k_twist >= 0.0) {
        return Err(Error::argument("twist gain must be finite and >= 0"));
    }

    let mut contacts = Vec::with_capacity(3);
    for i in 0..3 {
        let (origin, dir) = config.ray_of(i);
        let hit = object
            .intersect(origin, dir)
            .ok_or(Error::ContactMiss { finger: i + 1 })?;
        let inward = scale(hit.outward_normal, -1.0);
        let align = dot(inward, dir);
        if align <= 1e-12 {
            // Grazing or receding approach: no force can be transmitted.
            return Err(Error::ContactMiss { finger: i + 1 });
        }
        let misalign = cross(inward, dir).atan2(align);
        let (f_n, f_tan) = decompose_actuator_force(config.f_t, misalign.abs())?;
        let f_y = if misalign < 0.0 { -f_tan } else { f_tan };
        let wrench = ContactWrench::new(f_n, f_y, 0.0, 0.0, 0.0, object.mu, 0.0)?;
        contacts.push(FingerContact {
            point: hit.point,
            normal_dir_rad: inward[1].atan2(inward[0]),
            misalign_rad: misalign,
            wrench,
            t_z_nm: k_twist * misalign * f_n,
        });
    }
    Ok([contacts[0], contacts[1], contacts[2]])
}

/// Out-of-plane friction capacity of one contact: how much vertical pull it
/// can take on top of its in-plane tangential load before leaving the cone.
fn axial_capacity(w: &ContactWrench) -> f64 {
    let cap_sq = (w.mu * w.f_x).powi(2) - w.f_y * w.f_y;
    cap_sq.max(0.0).sqrt()
}

/// Largest vertical pull the resolved contacts resist, found by bisection on
/// the pull force: a pull is feasible when it can be split across contacts
/// with every Coulomb cone still satisfied. Contacts already slipping
/// in-plane contribute nothing. An entirely infeasible grasp returns 0.
pub fn resistance_of_contacts(contacts: &[FingerContact; 3]) -> f64 {
    let feasible = |pull: f64| -> bool {
        // Greedy allocation: each contact takes as much of the remaining
        // pull as its cone allows.
        let mut remaining = pull;
        for c in contacts {
            remaining -= axial_capacity(&c.wrench).min(remaining);
        }
        remaining <= 0.0
    };

    // The fully aligned capacity bounds the answer from above.
    let mut hi = contacts
        .iter()
        .map(|c| c.wrench.mu * c.wrench.f_x)
        .sum::<f64>();
    if hi <= 0.0 || !feasible(0.0) {
        return 0.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi.max(1.0) {
            break;
        }
    }
    lo
}

/// Resistance of a gripper posture against an object.
pub fn resistance_force(
    config: &GripperConfig,
    object: &ObjectShape,
    k_twist: f64,
) -> Result<f64> {
    Ok(resistance_of_contacts(&contact_solve(config, object, k_twist)?))
}

/// Grasping policy under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// Close the fingers and measure as-is.
    Conventional,
    /// Close, then null each finger's twist torque before measuring.
    Interactive,
}

impl Policy {
    pub fn label(self) -> &'static str {
        match self {
            Policy::Conventional => "conventional",
            Policy::Interactive => "interactive",
        }
    }
}

/// Everything a policy run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct GraspOutcome {
    pub policy: Policy,
    /// Gripper posture at measurement time (final joint angles).
    pub config: GripperConfig,
    pub contacts: [FingerContact; 3],
    /// Largest vertical pull resisted, N.
    pub resistance_n: f64,
    /// Whether torque nulling reached its threshold (always true for the
    /// conventional policy, which does not optimize).
    pub converged: bool,
    /// Controller iterations spent (0 for conventional).
    pub iterations: usize,
    /// Full controller trace for the interactive policy.
    pub trace: Option<OptimizationTrace>,
}

/// Close the gripper on the object and measure grasp robustness, optionally
/// running the torque-nulling loop first.
pub fn run_policy(
    policy: Policy,
    object: &ObjectShape,
    config: &GripperConfig,
    ctrl: &ControllerParams,
    k_twist: f64,
) -> Result<GraspOutcome> {
    match policy {
        Policy::Conventional => {
            let contacts = contact_solve(config, object, k_twist)?;
            Ok(GraspOutcome {
                policy,
                config: *config,
                contacts,
                resistance_n: resistance_of_contacts(&contacts),
                converged: true,
                iterations: 0,
                trace: None,
            })
        }
        Policy::Interactive => {
            // The torque oracle evaluates the scene at the proposed joint
            // angles. A contact loss mid-optimization surfaces as a
            // non-finite reading to the controller; the original error is
            // kept aside so the caller sees what actually went wrong.
            let lost_contact: RefCell<Option<Error>> = RefCell::new(None);
            let outcome = {
                let oracle = |thetas: &[f64; 3]| -> [f64; 3] {
                    match contact_solve(&config.with_thetas(*thetas), object, k_twist) {
                        Ok(contacts) => [
                            contacts[0].t_z_nm,
                            contacts[1].t_z_nm,
                            contacts[2].t_z_nm,
                        ],
                        Err(e) => {
                            *lost_contact.borrow_mut() = Some(e);
                            [f64::NAN; 3]
                        }
                    }
                };
                let initial = [
                    FingerState::new(1, config.thetas_deg[0])?,
                    FingerState::new(2, config.thetas_deg[1])?,
                    FingerState::new(3, config.thetas_deg[2])?,
                ];
                optimize_grasp(&initial, oracle, ctrl)
            };
            let (final_states, trace) = match outcome {
                Ok(pair) => pair,
                Err(e) => {
                    return Err(lost_contact.into_inner().unwrap_or(e));
                }
            };
            let thetas = [
                final_states[0].theta_deg,
                final_states[1].theta_deg,
                final_states[2].theta_deg,
            ];
            let final_config = config.with_thetas(thetas);
            let contacts = contact_solve(&final_config, object, k_twist)?;
            Ok(GraspOutcome {
                policy,
                config: final_config,
                contacts,
                resistance_n: resistance_of_contacts(&contacts),
                converged: trace.converged,
                iterations: trace.iterations as usize,
                trace: Some(trace),
            })
        }
    }
}

/// Percent change from `before` to `after`. A zero baseline yields positive
/// or negative infinity (or zero when nothing changed).
pub fn pct_change(before: f64, after: f64) -> f64 {
    if before == after {
        0.0
    } else {
        (after - before) / before * 100.0
    }
}

/// Side-by-side policy outcome for one object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyComparison {
    pub object: String,
    pub conventional_n: f64,
    pub interactive_n: f64,
    pub pct_change: f64,
    /// Iterations the interactive controller spent.
    pub iterations: usize,
    pub converged: bool,
}

/// Run both policies (each starting from the given posture) on every object.
pub fn compare_policies(
    objects: &[ObjectShape],
    config: &GripperConfig,
    ctrl: &ControllerParams,
    k_twist: f64,
) -> Result<Vec<PolicyComparison>> {
    if objects.is_empty() {
        return Err(Error::argument("policy comparison needs at least one object"));
    }
    objects
        .iter()
        .map(|object| {
            let conv = run_policy(Policy::Conventional, object, config, ctrl, k_twist)?;
            let inter = run_policy(Policy::Interactive, object, config, ctrl, k_twist)?;
            Ok(PolicyComparison {
                object: object.kind.label().to_string(),
                conventional_n: conv.resistance_n,
                interactive_n: inter.resistance_n,
                pct_change: pct_change(conv.resistance_n, inter.resistance_n),
                iterations: inter.iterations,
                converged: inter.converged,
            })
        })
        .collect()
}

/// Render a comparison as CSV, one row per object and policy.
pub fn comparison_csv(rows: &[PolicyComparison]) -> String {
    let mut out = String::from("object,policy,resistance_n,pct_change,iterations\n");
    for row in rows {
        out.push_str(&format!(
            "{},conventional,{},{},0\n",
            row.object,
            fmt_sig9(row.conventional_n),
            fmt_sig9(0.0),
        ));
        out.push_str(&format!(
            "{},interactive,{},{},{}\n",
            row.object,
            fmt_sig9(row.interactive_n),
            fmt_sig9(row.pct_change),
            row.iterations,
        ));
    }
    out
}

/// The four canonical objects, posed for the default circular grasp.
///
/// Sizes put every face within reach of a torque-nulled finger (so the
/// interactive policy can fully align), and the slight cuboid/cylinder tilts
/// de-align those grasps by different amounts than the cube's natural 30
/// degree corner approach.
pub fn default_object_suite() -> Vec<ObjectShape> {
    vec![
        ObjectShape::sphere(30.0),
        ObjectShape::cube(90.0),
        ObjectShape::cuboid(60.0, 110.0).with_pose(0.0, 0.0, 6.0),
        ObjectShape::cylinder(36.0, 110.0).with_pose(0.0, 0.0, -4.0),
    ]
}

/// Default gripper posture used by both policies.
pub fn default_gripper() -> GripperConfig {
    GripperConfig::circular(MOUNT_RADIUS_MM, DEFAULT_F_T)
}

/// A self-contained scene description, loadable from JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GripperSpec {
    #[serde(default = "default_mode")]
    pub mode: GripMode,
    #[serde(default = "default_f_t")]
    pub f_t: f64,
}

fn default_mode() -> GripMode {
    GripMode::Circular
}

impl Default for GripperSpec {
    fn default() -> Self {
        GripperSpec {
            mode: GripMode::Circular,
            f_t: DEFAULT_F_T,
        }
    }
}

/// Scene file: object, gripper, controller, and the twist gain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub object: ObjectShape,
    #[serde(default)]
    pub gripper: GripperSpec,
    #[serde(default)]
    pub controller: ControllerParams,
    #[serde(default = "default_k_twist")]
    pub k_twist: f64,
}

impl SceneSpec {
    pub fn gripper_config(&self) -> GripperConfig {
        GripperConfig::for_mode(self.gripper.mode, MOUNT_RADIUS_MM, self.gripper.f_t)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<SceneSpec> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const K: f64 = DEFAULT_K_TWIST;

    fn ctrl() -> ControllerParams {
        ControllerParams::default()
    }

    #[test]
    fn centered_sphere_is_perfectly_aligned() {
        let contacts =
            contact_solve(&default_gripper(), &ObjectShape::sphere(30.0), K).unwrap();
        for c in &contacts {
            assert!(c.misalign_rad.abs() < 1e-12);
            assert!(c.t_z_nm.abs() < 1e-12);
            assert!((c.wrench.f_x - DEFAULT_F_T).abs() < 1e-9);
            assert!(c.wrench.f_y.abs() < 1e-9);
        }
    }

    #[test]
    fn sphere_resistance_hits_the_thirteen_newton_anchor() {
        let r = resistance_force(&default_gripper(), &ObjectShape::sphere(30.0), K).unwrap();
        assert!((r - 13.0).abs() < 1e-6, "resistance {r}");
    }

    #[test]
    fn doubling_actuator_force_doubles_aligned_resistance() {
        let single = resistance_force(&default_gripper(), &ObjectShape::sphere(30.0), K).unwrap();
        let doubled_cfg = GripperConfig::circular(MOUNT_RADIUS_MM, 2.0 * DEFAULT_F_T);
        let doubled = resistance_force(&doubled_cfg, &ObjectShape::sphere(30.0), K).unwrap();
        assert!((doubled - 2.0 * single).abs() < 1e-6);
    }

    #[test]
    fn frictionless_grasp_resists_nothing() {
        let object = ObjectShape::sphere(30.0).with_mu(0.0);
        assert_eq!(resistance_force(&default_gripper(), &object, K).unwrap(), 0.0);
    }

    #[test]
    fn tilted_rect_objects_misalign_side_fingers_with_opposite_torques() {
        let cuboid = ObjectShape::cuboid(60.0, 110.0).with_pose(0.0, 0.0, 6.0);
        let contacts = contact_solve(&default_gripper(), &cuboid, K).unwrap();
        // The two side fingers approach the tilted faces at 24 and -36
        // degrees respectively.
        assert!((contacts[1].misalign_rad.to_degrees() - 24.0).abs() < 1e-9);
        assert!((contacts[2].misalign_rad.to_degrees() + 36.0).abs() < 1e-9);
        let nonzero: Vec<f64> = contacts
            .iter()
            .map(|c| c.t_z_nm)
            .filter(|t| t.abs() > 1e-9)
            .collect();
        assert!(nonzero.len() >= 2);
        assert!(nonzero.iter().any(|&t| t > 0.0) && nonzero.iter().any(|&t| t < 0.0));
    }

    #[test]
    fn contact_wrench_magnitude_equals_actuator_force() {
        let suite = default_object_suite();
        for object in &suite {
            let contacts = contact_solve(&default_gripper(), object, K).unwrap();
            for c in &contacts {
                let mag = (c.wrench.f_x.powi(2) + c.wrench.f_y.powi(2)).sqrt();
                assert!(
                    (mag - DEFAULT_F_T).abs() < 1e-9,
                    "{:?}: |force| {mag}",
                    object.kind
                );
            }
        }
    }

    #[test]
    fn parallel_grip_on_aligned_cylinder_has_no_misalignment() {
        let cylinder = ObjectShape::cylinder(36.0, 110.0);
        let config = GripperConfig::parallel(MOUNT_RADIUS_MM, DEFAULT_F_T);
        let contacts = contact_solve(&config, &cylinder, K).unwrap();
        for c in &contacts {
            assert!(c.misalign_rad.abs() < 1e-6);
        }
    }

    #[test]
    fn missing_object_names_the_finger() {
        let tiny_far = ObjectShape::sphere(1.0).with_pose(0.0, 70.0, 0.0);
        match contact_solve(&default_gripper(), &tiny_far, K) {
            // Finger 1 presses from (0, 80) and hits; fingers 2/3 miss.
            Err(Error::ContactMiss { finger }) => assert_eq!(finger, 2),
            other => panic!("expected a miss, got {other:?}"),
        }
    }

    #[test]
    fn interactive_nulls_torque_and_beats_conventional_on_the_cube() {
        let cube = ObjectShape::cube(90.0);
        let conv =
            run_policy(Policy::Conventional, &cube, &default_gripper(), &ctrl(), K).unwrap();
        let inter =
            run_policy(Policy::Interactive, &cube, &default_gripper(), &ctrl(), K).unwrap();
        assert!(inter.converged);
        for c in &inter.contacts {
            assert!(c.t_z_nm.abs() <= ctrl().delta);
        }
        assert!(
            inter.resistance_n > 1.5 * conv.resistance_n,
            "{} vs {}",
            inter.resistance_n,
            conv.resistance_n
        );
        assert!(inter.iterations > 0);
        assert!(inter.trace.is_some());
    }

    #[test]
    fn conventional_runs_are_identical() {
        let cuboid = ObjectShape::cuboid(60.0, 110.0).with_pose(0.0, 0.0, 6.0);
        let a = run_policy(Policy::Conventional, &cuboid, &default_gripper(), &ctrl(), K).unwrap();
        let b = run_policy(Policy::Conventional, &cuboid, &default_gripper(), &ctrl(), K).unwrap();
        assert_eq!(a.resistance_n, b.resistance_n);
        assert_eq!(a.contacts, b.contacts);
    }

    #[test]
    fn rotating_scene_and_gripper_together_changes_nothing() {
        let cuboid = ObjectShape::cuboid(60.0, 110.0).with_pose(0.0, 0.0, 6.0);
        let base = default_gripper();
        let plain = contact_solve(&base, &cuboid, K).unwrap();
        let angle = 17.0_f64.to_radians();
        let turned = contact_solve(
            &base.transformed(angle, [0.0, 0.0]),
            &cuboid.transformed(angle, [0.0, 0.0]),
            K,
        )
        .unwrap();
        for (a, b) in plain.iter().zip(&turned) {
            assert!((a.misalign_rad - b.misalign_rad).abs() < 1e-9);
            assert!((a.t_z_nm - b.t_z_nm).abs() < 1e-9);
        }
        let r_plain = resistance_of_contacts(&plain);
        let r_turned = resistance_of_contacts(&turned);
        assert!((r_plain - r_turned).abs() < 1e-9);
    }

    #[test]
    fn mirroring_flips_torques_and_preserves_resistance() {
        let cuboid = ObjectShape::cuboid(60.0, 110.0).with_pose(0.0, 0.0, 6.0);
        let base = default_gripper();
        let plain = contact_solve(&base, &cuboid, K).unwrap();
        let flipped = contact_solve(&base.mirrored(), &cuboid.mirrored(), K).unwrap();
        for (a, b) in plain.iter().zip(&flipped) {
            assert!((a.t_z_nm + b.t_z_nm).abs() < 1e-9, "{} vs {}", a.t_z_nm, b.t_z_nm);
        }
        assert!(
            (resistance_of_contacts(&plain) - resistance_of_contacts(&flipped)).abs() < 1e-9
        );
    }

    #[test]
    fn comparison_covers_the_suite_with_expected_signs() {
        let rows = compare_policies(&default_object_suite(), &default_gripper(), &ctrl(), K)
            .unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].object, "sphere");
        assert!(rows[0].pct_change.abs() <= 5.0);
        for row in &rows[1..] {
            assert!(row.pct_change > 30.0, "{}: {}", row.object, row.pct_change);
            assert!(row.converged);
        }
        let csv = comparison_csv(&rows);
        assert!(csv.starts_with("object,policy,resistance_n,pct_change,iterations\n"));
        assert_eq!(csv.lines().count(), 9);
    }

    #[test]
    fn percent_change_formula_matches_the_reference_case() {
        assert!((pct_change(8.1, 13.1) - 61.728395).abs() < 1e-5);
        assert_eq!(pct_change(0.0, 0.0), 0.0);
        assert_eq!(pct_change(13.0, 13.0), 0.0);
    }

    #[test]
    fn resistance_equals_sum_of_per_contact_capacities() {
        // Closed form for the bisection to agree with: each contact
        // contributes sqrt((mu f_x)^2 - f_y^2), floored at zero.
        let cuboid = ObjectShape::cuboid(60.0, 110.0).with_pose(0.0, 0.0, 6.0);
        let contacts = contact_solve(&default_gripper(), &cuboid, K).unwrap();
        let expected: f64 = contacts
            .iter()
            .map(|c| {
                ((c.wrench.mu * c.wrench.f_x).powi(2) - c.wrench.f_y.powi(2))
                    .max(0.0)
                    .sqrt()
            })
            .sum();
        let r = resistance_of_contacts(&contacts);
        assert!((r - expected).abs() < 1e-6, "{r} vs {expected}");
    }

    #[test]
    fn scene_spec_roundtrips_through_json() {
        let spec = SceneSpec {
            object: ObjectShape::cube(90.0),
            gripper: GripperSpec::default(),
            controller: ControllerParams::default(),
            k_twist: DEFAULT_K_TWIST,
        };
        let text = spec.to_json().unwrap();
        let back = SceneSpec::from_json(&text).unwrap();
        assert_eq!(back, spec);
        // Defaults fill in when fields are omitted.
        let sparse: SceneSpec =
            serde_json::from_str(r#"{"object":{"kind":"sphere","dims":{"circle":{"radius":30.0}}}}"#)
                .unwrap();
        assert_eq!(sparse.gripper.mode, GripMode::Circular);
        assert_eq!(sparse.k_twist, DEFAULT_K_TWIST);
        assert_eq!(sparse.object.mu, DEFAULT_MU);
    }

    #[test]
    fn invalid_scenes_are_rejected() {
        assert!(ObjectShape::sphere(-1.0).validate().is_err());
        assert!(ObjectShape::cube(0.0).validate().is_err());
        assert!(ObjectShape::sphere(1.0).with_mu(-0.5).validate().is_err());
        let mut config = default_gripper();
        config.f_t = 0.0;
        assert!(config.validate().is_err());
        assert!(contact_solve(&default_gripper(), &ObjectShape::sphere(30.0), f64::NAN).is_err());
    }
}
