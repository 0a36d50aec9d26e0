//! `grasp`: run the conventional-vs-interactive policy comparison over the
//! configured object suite and report resistance forces.

use anyhow::Result;

use fibergrip_core::sim::{
    compare_policies, comparison_csv, GripperConfig, MOUNT_RADIUS_MM,
};

use crate::config::RunConfig;
use crate::output::{table, Outputs};
use crate::svg;

pub fn run(config: &RunConfig, out: &Outputs) -> Result<()> {
    let gripper = GripperConfig::for_mode(
        config.grasp.gripper.mode,
        MOUNT_RADIUS_MM,
        config.grasp.gripper.f_t,
    );
    let rows = compare_policies(
        &config.grasp.objects,
        &gripper,
        &config.controller,
        config.grasp.k_twist,
    )?;

    let csv_file = config.report_dir().join("grasp.csv");
    out.write(&csv_file, &comparison_csv(&rows))?;
    let svg_file = config.report_dir().join("grasp.svg");
    if config.grasp.svg {
        out.write(&svg_file, &svg::grasp_bar_chart(&rows))?;
    }

    let table_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.object.clone(),
                format!("{:.2}", r.conventional_n),
                format!("{:.2}", r.interactive_n),
                format!("{:+.1}%", r.pct_change),
                r.iterations.to_string(),
                r.converged.to_string(),
            ]
        })
        .collect();
    print!(
        "{}",
        table(
            &["object", "conventional N", "interactive N", "change", "iterations", "converged"],
            &table_rows,
        )
    );
    println!("saved report to {}", csv_file.display());
    if config.grasp.svg {
        println!("saved chart to {}", svg_file.display());
    }
    Ok(())
}
