//! `stream`: replay a continuous randomized contact trajectory through the
//! sensor and the trained models, logging predicted vs true values per tick.
//!
//! The trajectory is a chain of press cycles: the probe approaches a
//! randomly chosen face position while the feed ramps up, holds, then
//! releases — positions and feed targets are drawn from the continuous
//! ranges, not the calibration grid.

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use fibergrip_core::calibration::{rmse, Target, TrainedModel};
use fibergrip_core::seeding::{domain, subseed};
use fibergrip_core::sensor::CENTER_INDEX;
use fibergrip_core::text::fmt_sig9;

use crate::commands::model_path;
use crate::config::RunConfig;
use crate::output::Outputs;

/// Noise-stream offset separating live ticks from both calibration datasets.
const STREAM_SAMPLE_BASE: u64 = 2_000_000;

pub const STREAM_CSV_HEADER: &str =
    "tick,p_index,v_index,feed_mm,a1,a2,a3,a4,a5,f_n_true,t_z_true,f_n_pred,t_z_pred,p_pred";

#[derive(Serialize)]
struct StreamSummary {
    ticks: u32,
    rmse_force_n: Option<f64>,
    rmse_torque_nm: Option<f64>,
    rmse_position: Option<f64>,
}

fn load_model(config: &RunConfig, target: Target) -> Result<TrainedModel> {
    let path = model_path(config, target);
    if !path.exists() {
        bail!(
            "streaming needs a trained {} model at {}; run `fibergrip train --target {}` first",
            target.label(),
            path.display(),
            target.label()
        );
    }
    let model = TrainedModel::load(&path)
        .with_context(|| format!("cannot load model {}", path.display()))?;
    if model.target != target {
        bail!(
            "model at {} was trained for {}, not {}",
            path.display(),
            model.target.label(),
            target.label()
        );
    }
    Ok(model)
}

pub fn run(config: &RunConfig, out: &Outputs) -> Result<()> {
    let seed = config.require_seed()?;
    let force_model = load_model(config, Target::Force)?;
    let torque_model = load_model(config, Target::Torque)?;
    let position_model = load_model(config, Target::PositionHorizontal)?;

    let sensor = config.sensor_model(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(subseed(seed, domain::STREAM));
    let ticks = config.stream.ticks;
    let max_feed = config.protocol.max_feed_mm;

    let mut csv = String::from(STREAM_CSV_HEADER);
    csv.push('\n');
    let mut truth_f = Vec::with_capacity(ticks as usize);
    let mut truth_t = Vec::with_capacity(ticks as usize);
    let mut truth_p = Vec::with_capacity(ticks as usize);
    let mut pred_f = Vec::with_capacity(ticks as usize);
    let mut pred_t = Vec::with_capacity(ticks as usize);
    let mut pred_p = Vec::with_capacity(ticks as usize);

    let mut tick: u32 = 0;
    let mut p = 0.0;
    let mut first_segment = true;
    'outer: while tick < ticks {
        // Draw the next press cycle.
        let p_target = rng.gen_range(1.0..=10.0);
        let feed_peak = rng.gen_range(0.2..=max_feed.max(0.2));
        let approach = rng.gen_range(15..=35u32);
        let hold = rng.gen_range(5..=20u32);
        let release = rng.gen_range(15..=35u32);
        let p_start = if first_segment { p_target } else { p };
        first_segment = false;

        for step in 0..approach + hold + release {
            if tick >= ticks {
                break 'outer;
            }
            let (p_now, feed) = if step < approach {
                let frac = (step + 1) as f64 / approach as f64;
                (
                    p_start + (p_target - p_start) * frac,
                    feed_peak * frac,
                )
            } else if step < approach + hold {
                (p_target, feed_peak)
            } else {
                let frac = (step - approach - hold + 1) as f64 / release as f64;
                (p_target, feed_peak * (1.0 - frac))
            };
            p = p_now;

            let contact = sensor.contact(p_now, CENTER_INDEX, feed)?;
            let reading = sensor.sense(&contact, STREAM_SAMPLE_BASE + tick as u64);
            let features: Vec<f64> = reading.a.to_vec();
            let f_hat = force_model.predict_one(&features)?;
            let t_hat = torque_model.predict_one(&features)?;
            let p_hat = position_model.predict_one(&features)?;

            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                tick,
                fmt_sig9(p_now),
                fmt_sig9(CENTER_INDEX),
                fmt_sig9(feed),
                fmt_sig9(reading.a[0]),
                fmt_sig9(reading.a[1]),
                fmt_sig9(reading.a[2]),
                fmt_sig9(reading.a[3]),
                fmt_sig9(reading.a[4]),
                fmt_sig9(contact.f_n),
                fmt_sig9(contact.t_z),
                fmt_sig9(f_hat),
                fmt_sig9(t_hat),
                fmt_sig9(p_hat)
            ));
            truth_f.push(contact.f_n);
            truth_t.push(contact.t_z);
            truth_p.push(p_now);
            pred_f.push(f_hat);
            pred_t.push(t_hat);
            pred_p.push(p_hat);
            tick += 1;
        }
    }

    let summary = StreamSummary {
        ticks,
        rmse_force_n: (!truth_f.is_empty()).then(|| rmse(&pred_f, &truth_f)).transpose()?,
        rmse_torque_nm: (!truth_t.is_empty()).then(|| rmse(&pred_t, &truth_t)).transpose()?,
        rmse_position: (!truth_p.is_empty()).then(|| rmse(&pred_p, &truth_p)).transpose()?,
    };

    let log_file = config.report_dir().join("stream.csv");
    out.write(&log_file, &csv)?;
    let summary_file = config.report_dir().join("stream_summary.json");
    let mut summary_json = serde_json::to_string_pretty(&summary)?;
    summary_json.push('\n');
    out.write(&summary_file, &summary_json)?;

    match (
        summary.rmse_force_n,
        summary.rmse_torque_nm,
        summary.rmse_position,
    ) {
        (Some(f), Some(t), Some(p)) => println!(
            "{} ticks: rmse force {:.4} N, torque {:.6} N*m, position {:.4}",
            ticks, f, t, p
        ),
        _ => println!("0 ticks: empty stream"),
    }
    println!("saved log to {}", log_file.display());
    println!("saved summary to {}", summary_file.display());
    Ok(())
}
