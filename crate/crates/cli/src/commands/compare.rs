//! `compare`: the full cross-target model matrix — every enabled family
//! grid-searched against every target, reported as held-out test RMSE.

use anyhow::Result;

use fibergrip_core::calibration::Target;
use fibergrip_core::text::fmt_sig9;

use crate::commands::train::{search_families, winner_index, FamilyScore};
use crate::commands::SplitData;
use crate::config::RunConfig;
use crate::output::{table, Outputs};

pub fn run(config: &RunConfig, out: &Outputs) -> Result<()> {
    let seed = config.require_seed()?;

    // One column of family scores per target.
    let mut columns: Vec<(Target, Vec<FamilyScore>, usize)> = Vec::new();
    for target in Target::ALL {
        let dataset = crate::commands::load_dataset(config, target)?;
        let data = SplitData::of(&dataset, target);
        let scores = search_families(config, target, &data, seed)?;
        let winner = winner_index(&scores);
        columns.push((target, scores, winner));
    }

    let mut csv = String::from("family");
    for (target, _, _) in &columns {
        csv.push(',');
        csv.push_str(target.label());
    }
    csv.push('\n');
    for (i, family) in config.families.iter().enumerate() {
        csv.push_str(family.label());
        for (_, scores, _) in &columns {
            csv.push_str(&format!(
                ",{}",
                fmt_sig9(scores[i].result.report.test_rmse.unwrap_or(f64::NAN))
            ));
        }
        csv.push('\n');
    }
    csv.push_str("winner");
    for (_, scores, winner) in &columns {
        csv.push_str(&format!(",{}", scores[*winner].family.label()));
    }
    csv.push('\n');

    let report_file = config.report_dir().join("model_comparison.csv");
    out.write(&report_file, &csv)?;

    let mut headers = vec!["family"];
    for (target, _, _) in &columns {
        headers.push(target.label());
    }
    let mut rows: Vec<Vec<String>> = Vec::new();
    for (i, family) in config.families.iter().enumerate() {
        let mut row = vec![family.label().to_string()];
        for (_, scores, winner) in &columns {
            let cell = format!(
                "{:.4}{}",
                scores[i].result.report.test_rmse.unwrap_or(f64::NAN),
                if i == *winner { " *" } else { "" }
            );
            row.push(cell);
        }
        rows.push(row);
    }
    print!("{}", table(&headers, &rows));
    println!("(test RMSE; * marks the family with the best cross-validation score)");
    println!("saved report to {}", report_file.display());
    Ok(())
}
