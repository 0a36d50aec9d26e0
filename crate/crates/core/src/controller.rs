//! Torque-nulling grasp orientation controller.
//!
//! Each finger senses the twist torque `t_z` at its contact; a nonzero value
//! means the pressing axis is misaligned from the surface normal. The
//! controller runs one proportional loop per finger,
//!
//! ```text
//! theta_i <- theta_i - gamma * t_z,i        (while |t_z,i| > delta)
//! ```
//!
//! where the step is expressed in actuator ticks and converted to degrees
//! through the servo's resolution. Sensing and actuation alternate strictly:
//! one oracle query per iteration, then every still-active finger moves.
//!
//! Two safety mechanisms bound the loop on hostile plants: orientations clamp
//! to the joint range (recorded as saturation in the trace), and a finger
//! whose |t_z| fails to decrease over ten consecutive iterations has its
//! effective gain halved, which recovers convergence whenever the raw gain
//! overshoots the stability limit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::fmt_sig9;

/// Joint range of the orientation axis, degrees.
pub const THETA_LIMIT_DEG: f64 = 90.0;
/// Consecutive non-improving iterations tolerated before a finger's gain is
/// halved.
const OSCILLATION_WINDOW: u32 = 10;

/// Update scheduling across the three fingers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    /// All fingers update from the same sensing snapshot each iteration.
    #[default]
    Synchronous,
    /// Fingers update one at a time, each from a fresh snapshot.
    Asynchronous,
}

/// Unit of the orientation values exchanged with the controller. Only
/// degrees are supported; the field exists so serialized configurations are
/// explicit about it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AngleUnit {
    #[default]
    Degrees,
}

/// Gains and stop conditions of the controller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ControllerParams {
    /// Proportional gain, actuator ticks per N*m of sensed torque.
    pub gamma: f64,
    /// Torque threshold below which a finger is considered aligned, N*m.
    pub delta: f64,
    /// Hard cap on update iterations.
    pub max_iterations: u32,
    /// Servo resolution: degrees per actuator tick.
    pub deg_per_tick: f64,
    /// Finger update scheduling.
    pub schedule: Schedule,
    /// Unit of theta values (always degrees).
    pub angle_unit: AngleUnit,
}

impl Default for ControllerParams {
    fn default() -> Self {
        ControllerParams {
            gamma: 10_000.0,
            delta: 0.002,
            max_iterations: 500,
            deg_per_tick: 0.088,
            schedule: Schedule::Synchronous,
            angle_unit: AngleUnit::Degrees,
        }
    }
}

impl ControllerParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::argument("gamma must be positive"));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::argument("delta must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::argument("max_iterations must be at least 1"));
        }
        if !(self.deg_per_tick.is_finite() && self.deg_per_tick > 0.0) {
            return Err(Error::argument("deg_per_tick must be positive"));
        }
        Ok(())
    }
}

/// One finger's orientation and last sensed torque.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FingerState {
    /// Finger id, 1..=3.
    pub finger: usize,
    /// Orientation in degrees, within the joint range.
    pub theta_deg: f64,
    /// Last sensed twist torque, N*m.
    pub t_z_nm: f64,
}

impl FingerState {
    pub fn new(finger: usize, theta_deg: f64) -> Result<Self> {
        if !(1..=3).contains(&finger) {
            return Err(Error::argument(format!("finger id {finger} outside 1..=3")));
        }
        if !theta_deg.is_finite() || theta_deg.abs() > THETA_LIMIT_DEG {
            return Err(Error::argument(format!(
                "theta {theta_deg} deg outside the +/-{THETA_LIMIT_DEG} joint range"
            )));
        }
        Ok(FingerState {
            finger,
            theta_deg,
            t_z_nm: 0.0,
        })
    }
}

/// One sensing row of the optimization trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    /// Iteration the row was sensed at (0 is the initial state).
    pub iter: u32,
    /// Finger id, 1..=3.
    pub finger: usize,
    /// Orientation when sensing happened, degrees.
    pub theta_deg: f64,
    /// Sensed twist torque, N*m.
    pub t_z_nm: f64,
    /// Whether the update that produced this orientation hit the joint limit.
    pub saturated: bool,
}

/// A gain-halving event triggered by the oscillation detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainEvent {
    pub iter: u32,
    pub finger: usize,
    /// Effective gain after halving.
    pub gamma_effective: f64,
}

/// Full record of one optimization run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub records: Vec<TraceRecord>,
    pub gain_events: Vec<GainEvent>,
    /// Whether every finger ended inside the torque threshold.
    pub converged: bool,
    /// Number of update iterations performed.
    pub iterations: u32,
}

impl OptimizationTrace {
    /// Serialize the sensing rows as CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,finger,theta_deg,t_z_nm,saturated\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.iter,
                r.finger,
                fmt_sig9(r.theta_deg),
                fmt_sig9(r.t_z_nm),
                r.saturated
            ));
        }
        out
    }

    /// Largest |t_z| in the final sensing snapshot.
    pub fn final_torque_magnitude(&self) -> f64 {
        self.records
            .iter()
            .rev()
            .take(3)
            .map(|r| r.t_z_nm.abs())
            .fold(0.0, f64::max)
    }
}

/// Run the torque-nulling loop on three fingers.
///
/// `oracle` maps the three orientations (degrees) to the three sensed
/// torques (N*m); it is queried once per iteration in synchronous mode and
/// once per finger update in asynchronous mode. Returns the final finger
/// states together with the trace. The run always terminates within
/// `max_iterations` update rounds; `trace.converged` reports whether the
/// final snapshot satisfies |t_z| <= delta on every finger (which is exactly
/// the fixed-point condition of the loop). A non-finite torque from the
/// oracle aborts with a controller error.
pub fn optimize_grasp<F>(
    initial: &[FingerState; 3],
    mut oracle: F,
    params: &ControllerParams,
) -> Result<([FingerState; 3], OptimizationTrace)>
where
    F: FnMut(&[f64; 3]) -> [f64; 3],
{
    params.validate()?;
    for (i, s) in initial.iter().enumerate() {
        if s.finger != i + 1 {
            return Err(Error::argument("finger ids must be 1, 2, 3 in order"));
        }
        if !s.theta_deg.is_finite() || s.theta_deg.abs() > THETA_LIMIT_DEG {
            return Err(Error::argument(format!(
                "initial theta of finger {} outside the joint range",
                s.finger
            )));
        }
    }

    let mut thetas = [
        initial[0].theta_deg,
        initial[1].theta_deg,
        initial[2].theta_deg,
    ];
    let mut gamma_eff = [params.gamma; 3];
    let mut stall_count = [0u32; 3];
    let mut best_abs = [f64::INFINITY; 3];
    let mut saturated = [false; 3];
    let mut trace = OptimizationTrace::default();
    let mut torques;
    let mut rounds = 0u32;

    let sense = |oracle: &mut F, thetas: &[f64; 3], round: u32| -> Result<[f64; 3]> {
        let t = oracle(thetas);
        if t.iter().any(|x| !x.is_finite()) {
            return Err(Error::Controller(format!(
                "oracle returned a non-finite torque at iteration {round}"
            )));
        }
        Ok(t)
    };

    // One finger's proportional step, with oscillation fallback and joint
    // clamping. A finger stalls when it fails to set a new personal-best
    // |t_z|; a full window of stalls (which a contracting loop can never
    // accumulate) halves its gain. Returns whether the step saturated.
    let step = |i: usize,
                t_i: f64,
                thetas: &mut [f64; 3],
                gamma_eff: &mut [f64; 3],
                stall_count: &mut [u32; 3],
                best_abs: &mut [f64; 3],
                trace: &mut OptimizationTrace,
                round: u32|
     -> bool {
        let mag = t_i.abs();
        if mag < best_abs[i] {
            best_abs[i] = mag;
            stall_count[i] = 0;
        } else {
            stall_count[i] += 1;
            if stall_count[i] >= OSCILLATION_WINDOW {
                gamma_eff[i] *= 0.5;
                stall_count[i] = 0;
                trace.gain_events.push(GainEvent {
                    iter: round,
                    finger: i + 1,
                    gamma_effective: gamma_eff[i],
                });
            }
        }
        let raw = thetas[i] - gamma_eff[i] * t_i * params.deg_per_tick;
        let clamped = raw.clamp(-THETA_LIMIT_DEG, THETA_LIMIT_DEG);
        thetas[i] = clamped;
        clamped != raw
    };

    loop {
        torques = sense(&mut oracle, &thetas, rounds)?;
        for i in 0..3 {
            trace.records.push(TraceRecord {
                iter: rounds,
                finger: i + 1,
                theta_deg: thetas[i],
                t_z_nm: torques[i],
                saturated: saturated[i],
            });
        }
        if torques.iter().all(|t| t.abs() <= params.delta) {
            trace.converged = true;
            break;
        }
        if rounds >= params.max_iterations {
            break;
        }
        match params.schedule {
            Schedule::Synchronous => {
                for i in 0..3 {
                    if torques[i].abs() > params.delta {
                        saturated[i] = step(
                            i,
                            torques[i],
                            &mut thetas,
                            &mut gamma_eff,
                            &mut stall_count,
                            &mut best_abs,
                            &mut trace,
                            rounds,
                        );
                    } else {
                        saturated[i] = false;
                        stall_count[i] = 0;
                    }
                }
            }
            Schedule::Asynchronous => {
                let mut fresh = torques;
                for i in 0..3 {
                    if i > 0 {
                        fresh = sense(&mut oracle, &thetas, rounds)?;
                    }
                    if fresh[i].abs() > params.delta {
                        saturated[i] = step(
                            i,
                            fresh[i],
                            &mut thetas,
                            &mut gamma_eff,
                            &mut stall_count,
                            &mut best_abs,
                            &mut trace,
                            rounds,
                        );
                    } else {
                        saturated[i] = false;
                        stall_count[i] = 0;
                    }
                }
            }
        }
        rounds += 1;
    }

    trace.iterations = rounds;
    let finals = [
        FingerState {
            finger: 1,
            theta_deg: thetas[0],
            t_z_nm: torques[0],
        },
        FingerState {
            finger: 2,
            theta_deg: thetas[1],
            t_z_nm: torques[1],
        },
        FingerState {
            finger: 3,
            theta_deg: thetas[2],
            t_z_nm: torques[2],
        },
    ];
    Ok((finals, trace))
}

/// Convenience constructor for three zero-orientation fingers.
pub fn neutral_fingers() -> [FingerState; 3] {
    [
        FingerState::new(1, 0.0).unwrap(),
        FingerState::new(2, 0.0).unwrap(),
        FingerState::new(3, 0.0).unwrap(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Linear plant with unit tick conversion: t_z = k * (theta - target).
    fn linear_params(gamma: f64) -> ControllerParams {
        ControllerParams {
            gamma,
            deg_per_tick: 1.0,
            ..ControllerParams::default()
        }
    }

    fn linear_oracle(k: [f64; 3], target: [f64; 3]) -> impl FnMut(&[f64; 3]) -> [f64; 3] {
        move |thetas| {
            [
                k[0] * (thetas[0] - target[0]),
                k[1] * (thetas[1] - target[1]),
                k[2] * (thetas[2] - target[2]),
            ]
        }
    }

    #[test]
    fn already_aligned_runs_zero_iterations() {
        let params = ControllerParams::default();
        let initial = neutral_fingers();
        let (finals, trace) =
            optimize_grasp(&initial, |_| [0.0, 0.001, -0.0015], &params).unwrap();
        assert!(trace.converged);
        assert_eq!(trace.iterations, 0);
        assert_eq!(trace.records.len(), 3);
        for (f, s) in finals.iter().zip(initial.iter()) {
            assert_eq!(f.theta_deg, s.theta_deg);
        }
    }

    #[test]
    fn linear_plant_converges_for_stable_gains() {
        // Effective loop gain gamma * k in (0, 1.9] contracts the error.
        for gain in [0.1, 0.5, 1.0, 1.5, 1.9] {
            let k = 0.001;
            let params = linear_params(gain / k);
            let oracle = linear_oracle([k; 3], [20.0, -35.0, 5.0]);
            let (finals, trace) = optimize_grasp(&neutral_fingers(), oracle, &params).unwrap();
            assert!(trace.converged, "gain {gain} failed to converge");
            // At the fixed point each finger sits within delta/k of its target.
            for (f, target) in finals.iter().zip([20.0, -35.0, 5.0]) {
                assert!(f.t_z_nm.abs() <= params.delta);
                assert!((f.theta_deg - target).abs() <= params.delta / k + 1e-9);
            }
        }
    }

    #[test]
    fn iteration_count_grows_logarithmically() {
        // For a contraction factor r, iterations scale like log(t0/delta) /
        // -log(r); check the measured count stays within 2x of that bound.
        let k = 0.001;
        for gain in [0.5, 1.0, 1.5] {
            let params = linear_params(gain / k);
            let oracle = linear_oracle([k; 3], [40.0, 40.0, 40.0]);
            let (_, trace) = optimize_grasp(&neutral_fingers(), oracle, &params).unwrap();
            let r: f64 = (1.0 - gain as f64).abs();
            let t0 = k * 40.0;
            let bound = if r == 0.0 {
                2.0
            } else {
                (t0 / params.delta).ln() / -r.ln() + 2.0
            };
            assert!(
                (trace.iterations as f64) <= 2.0 * bound.max(2.0),
                "gain {gain}: {} iterations vs bound {bound}",
                trace.iterations
            );
        }
    }

    #[test]
    fn unstable_gain_is_rescued_by_halving() {
        // gamma * k = 3.2 diverges outright; the oscillation detector halves
        // the gain until the loop contracts again.
        let k = 0.001;
        let params = linear_params(3.2 / k);
        let oracle = linear_oracle([k; 3], [10.0, 10.0, 10.0]);
        let (finals, trace) = optimize_grasp(&neutral_fingers(), oracle, &params).unwrap();
        assert!(trace.converged);
        assert!(!trace.gain_events.is_empty());
        for f in finals {
            assert!(f.t_z_nm.abs() <= params.delta);
        }
    }

    #[test]
    fn hostile_oracle_still_terminates() {
        // A sign-flipping oracle that never settles must still stop at the
        // iteration cap.
        let params = ControllerParams {
            deg_per_tick: 1.0,
            ..ControllerParams::default()
        };
        let mut flip = 1.0;
        let oracle = move |_: &[f64; 3]| {
            flip = -flip;
            [0.05 * flip; 3]
        };
        let (_, trace) = optimize_grasp(&neutral_fingers(), oracle, &params).unwrap();
        assert!(!trace.converged);
        assert_eq!(trace.iterations, params.max_iterations);
    }

    #[test]
    fn joint_limit_clamps_and_records_saturation() {
        // Huge constant torque would drive theta far past the limit.
        let params = ControllerParams {
            max_iterations: 5,
            deg_per_tick: 1.0,
            ..ControllerParams::default()
        };
        let (finals, trace) = optimize_grasp(&neutral_fingers(), |_| [0.05; 3], &params).unwrap();
        assert!(!trace.converged);
        for f in finals {
            assert!(f.theta_deg.abs() <= THETA_LIMIT_DEG);
        }
        assert!(trace.records.iter().any(|r| r.saturated));
    }

    #[test]
    fn non_finite_torque_is_a_controller_error() {
        let params = ControllerParams::default();
        let err = optimize_grasp(&neutral_fingers(), |_| [f64::NAN, 0.0, 0.0], &params);
        assert!(matches!(err, Err(Error::Controller(_))));
    }

    #[test]
    fn fingers_are_treated_symmetrically() {
        // Permuting the plant across fingers permutes the results.
        let k = [0.001, 0.002, 0.0005];
        let target = [12.0, -8.0, 25.0];
        let params = linear_params(800.0);
        let (a, _) =
            optimize_grasp(&neutral_fingers(), linear_oracle(k, target), &params).unwrap();
        let (b, _) = optimize_grasp(
            &neutral_fingers(),
            linear_oracle([k[2], k[0], k[1]], [target[2], target[0], target[1]]),
            &params,
        )
        .unwrap();
        assert!((a[0].theta_deg - b[1].theta_deg).abs() < 1e-12);
        assert!((a[1].theta_deg - b[2].theta_deg).abs() < 1e-12);
        assert!((a[2].theta_deg - b[0].theta_deg).abs() < 1e-12);
    }

    #[test]
    fn asynchronous_schedule_converges_too() {
        let k = 0.001;
        let params = ControllerParams {
            schedule: Schedule::Asynchronous,
            ..linear_params(1.0 / k)
        };
        let oracle = linear_oracle([k; 3], [15.0, -10.0, 30.0]);
        let (finals, trace) = optimize_grasp(&neutral_fingers(), oracle, &params).unwrap();
        assert!(trace.converged);
        for f in finals {
            assert!(f.t_z_nm.abs() <= params.delta);
        }
    }

    #[test]
    fn trace_cadence_is_one_query_per_iteration() {
        // Synchronous mode: the oracle must be called exactly iterations + 1
        // times (each call records three rows).
        let k = 0.001;
        let params = linear_params(1.0 / k);
        let mut calls = 0u32;
        let mut plant = linear_oracle([k; 3], [20.0, 20.0, 20.0]);
        let oracle = |thetas: &[f64; 3]| {
            calls += 1;
            plant(thetas)
        };
        let (_, trace) = optimize_grasp(&neutral_fingers(), oracle, &params).unwrap();
        assert_eq!(calls, trace.iterations + 1);
        assert_eq!(trace.records.len() as u32, 3 * (trace.iterations + 1));
    }

    #[test]
    fn trace_csv_has_expected_header() {
        let params = ControllerParams::default();
        let (_, trace) = optimize_grasp(&neutral_fingers(), |_| [0.0; 3], &params).unwrap();
        let csv = trace.to_csv();
        assert!(csv.starts_with("iter,finger,theta_deg,t_z_nm,saturated\n"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn rejects_bad_parameters_and_states() {
        let bad = ControllerParams {
            gamma: 0.0,
            ..ControllerParams::default()
        };
        assert!(optimize_grasp(&neutral_fingers(), |_| [0.0; 3], &bad).is_err());
        assert!(FingerState::new(0, 0.0).is_err());
        assert!(FingerState::new(1, 91.0).is_err());
    }
}
