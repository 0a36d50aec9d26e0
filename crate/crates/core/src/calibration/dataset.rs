//! Calibration dataset collection and CSV interchange.
//!
//! Two collection protocols are supported, mirroring how the finger is
//! characterized on the bench:
//!
//! * the main protocol sweeps the ten horizontal contact positions with
//!   random feeds up to full travel, recording readings against the
//!   ground-truth wrench;
//! * the vertical protocol holds the normal force constant (feed solved by
//!   bisection) and sweeps the ten vertical positions, which isolates the
//!   height-dependent part of the response.
//!
//! Every dataset carries a per-row train/test split drawn from its seed, so
//! the same seed always reproduces the same file byte for byte.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding::{domain, subseed};
use crate::sensor::{FingerPhysicalModel, CENTER_INDEX, CHANNEL_COUNT};
use crate::text::{fmt_sig9, parse_f64};

/// Fraction of samples assigned to the training split.
const TRAIN_FRACTION: f64 = 0.8;
/// Column layout of the dataset CSV format.
pub const CSV_HEADER: &str = "p_index,v_index,m_index,a1,a2,a3,a4,a5,f_n,t_z,split";

/// Train/test membership of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

/// The quantity a model is trained to predict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// Normal force, N.
    Force,
    /// Z-torque, N*m.
    Torque,
    /// Horizontal contact position index.
    PositionHorizontal,
    /// Vertical contact position index.
    PositionVertical,
}

impl Target {
    pub const ALL: [Target; 4] = [
        Target::Force,
        Target::Torque,
        Target::PositionHorizontal,
        Target::PositionVertical,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Target::Force => "force",
            Target::Torque => "torque",
            Target::PositionHorizontal => "position-horizontal",
            Target::PositionVertical => "position-vertical",
        }
    }
}

/// One labeled calibration sample: the five channel readings plus everything
/// the bench knew about the contact that produced them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSample {
    /// Horizontal contact position index.
    pub p_index: f64,
    /// Vertical contact position index (held at the centerline by the main
    /// protocol, swept by the vertical protocol).
    pub v_index: f64,
    /// Feed depth in millimeters.
    pub m_index: f64,
    /// Channel readings in dB.
    pub a: [f64; CHANNEL_COUNT],
    /// Ground-truth normal force, N.
    pub f_n: f64,
    /// Ground-truth Z-torque, N*m.
    pub t_z: f64,
}

impl CalibrationSample {
    pub fn target(&self, target: Target) -> f64 {
        match target {
            Target::Force => self.f_n,
            Target::Torque => self.t_z,
            Target::PositionHorizontal => self.p_index,
            Target::PositionVertical => self.v_index,
        }
    }
}

/// Main-protocol parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Protocol {
    /// Total samples to collect.
    pub n_points: usize,
    /// Number of horizontal grid positions to cycle through.
    pub positions: usize,
    /// Maximum feed depth, mm.
    pub max_feed_mm: f64,
}

impl Default for Protocol {
    fn default() -> Self {
        Protocol {
            n_points: 1000,
            positions: 10,
            max_feed_mm: 10.0,
        }
    }
}

/// Constant-force vertical-sweep parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerticalProtocol {
    pub n_points: usize,
    /// Number of vertical grid positions to cycle through.
    pub positions: usize,
    /// Normal force to hold during the sweep, N.
    pub constant_force_n: f64,
}

impl Default for VerticalProtocol {
    fn default() -> Self {
        VerticalProtocol {
            n_points: 100,
            positions: 10,
            constant_force_n: 3.0,
        }
    }
}

/// A collected dataset with its split assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: Vec<CalibrationSample>,
    pub split: Vec<Split>,
    pub seed: u64,
}

fn grid_index(i: usize, positions: usize) -> f64 {
    // Cycle the 1-based grid: 1, 2, ..., positions, 1, 2, ...
    (i % positions) as f64 + 1.0
}

/// Assign train/test flags by seeded shuffle: disjoint, exhaustive, with
/// round(TRAIN_FRACTION * n) training rows.
fn assign_split(n: usize, seed: u64) -> Vec<Split> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Fisher-Yates shuffle.
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let n_train = ((n as f64) * TRAIN_FRACTION).round() as usize;
    let mut split = vec![Split::Test; n];
    for &idx in order.iter().take(n_train) {
        split[idx] = Split::Train;
    }
    split
}

impl Dataset {
    /// Collect a main-protocol dataset from the forward model.
    pub fn generate(
        model: &FingerPhysicalModel,
        protocol: &Protocol,
        seed: u64,
    ) -> Result<Dataset> {
        model.validate()?;
        if protocol.positions == 0 || protocol.positions > 10 {
            return Err(Error::protocol("positions must be within 1..=10"));
        }
        if !(0.0..=10.0).contains(&protocol.max_feed_mm) {
            return Err(Error::protocol("max feed must be within [0, 10] mm"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(subseed(seed, domain::MAIN_DATASET));
        let mut samples = Vec::with_capacity(protocol.n_points);
        for i in 0..protocol.n_points {
            let p = grid_index(i, protocol.positions);
            let feed = rng.gen_range(0.0..=protocol.max_feed_mm);
            let contact = model.contact(p, CENTER_INDEX, feed)?;
            let reading = model.sense(&contact, i as u64);
            samples.push(CalibrationSample {
                p_index: p,
                v_index: CENTER_INDEX,
                m_index: feed,
                a: reading.a,
                f_n: contact.f_n,
                t_z: contact.t_z,
            });
        }
        let split = assign_split(protocol.n_points, subseed(seed, domain::MAIN_DATASET ^ 0xff));
        Ok(Dataset {
            samples,
            split,
            seed,
        })
    }

    /// Collect a constant-force vertical sweep from the forward model.
    pub fn generate_vertical(
        model: &FingerPhysicalModel,
        protocol: &VerticalProtocol,
        seed: u64,
    ) -> Result<Dataset> {
        model.validate()?;
        if protocol.positions == 0 || protocol.positions > 10 {
            return Err(Error::protocol("positions must be within 1..=10"));
        }
        let feed = model.solve_feed_for_force(protocol.constant_force_n)?;
        let mut samples = Vec::with_capacity(protocol.n_points);
        for i in 0..protocol.n_points {
            let v = grid_index(i, protocol.positions);
            let contact = model.contact(CENTER_INDEX, v, feed)?;
            let reading = model.sense(&contact, i as u64 + 1_000_000);
            samples.push(CalibrationSample {
                p_index: CENTER_INDEX,
                v_index: v,
                m_index: feed,
                a: reading.a,
                f_n: contact.f_n,
                t_z: contact.t_z,
            });
        }
        let split = assign_split(
            protocol.n_points,
            subseed(seed, domain::VERTICAL_DATASET ^ 0xff),
        );
        Ok(Dataset {
            samples,
            split,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn indices_of(&self, split: Split) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.split[i] == split).collect()
    }

    /// Feature rows for a set of sample indices, optionally restricted to a
    /// subset of the five channels (columns are emitted in the order given).
    pub fn features(&self, rows: &[usize], columns: Option<&[usize]>) -> Vec<Vec<f64>> {
        let all: Vec<usize> = (0..CHANNEL_COUNT).collect();
        let cols = columns.unwrap_or(&all);
        rows.iter()
            .map(|&r| cols.iter().map(|&c| self.samples[r].a[c]).collect())
            .collect()
    }

    pub fn targets(&self, rows: &[usize], target: Target) -> Vec<f64> {
        rows.iter().map(|&r| self.samples[r].target(target)).collect()
    }

    /// Serialize to the dataset CSV format.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for (s, sp) in self.samples.iter().zip(&self.split) {
            let fields = [
                s.p_index, s.v_index, s.m_index, s.a[0], s.a[1], s.a[2], s.a[3], s.a[4], s.f_n,
                s.t_z,
            ];
            let mut row: Vec<String> = fields.iter().map(|&f| fmt_sig9(f)).collect();
            row.push(sp.as_str().to_string());
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Parse the dataset CSV format, reporting 1-based line numbers on
    /// malformed input. The seed is not stored in the file; pass the run seed
    /// back in so downstream stages stay reproducible.
    pub fn from_csv(text: &str, seed: u64) -> Result<Dataset> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim() == CSV_HEADER => {}
            Some((_, header)) => {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("unexpected header {header:?}"),
                })
            }
            None => {
                return Err(Error::Parse {
                    line: 1,
                    message: "empty file".into(),
                })
            }
        }
        let mut samples = Vec::new();
        let mut split = Vec::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 11 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 11 fields, got {}", fields.len()),
                });
            }
            let num = |i: usize| parse_f64(fields[i], line_no);
            samples.push(CalibrationSample {
                p_index: num(0)?,
                v_index: num(1)?,
                m_index: num(2)?,
                a: [num(3)?, num(4)?, num(5)?, num(6)?, num(7)?],
                f_n: num(8)?,
                t_z: num(9)?,
            });
            split.push(match fields[10].trim() {
                "train" => Split::Train,
                "test" => Split::Test,
                other => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("split must be train or test, got {other:?}"),
                    })
                }
            });
        }
        Ok(Dataset {
            samples,
            split,
            seed,
        })
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn read_csv(path: &std::path::Path, seed: u64) -> Result<Dataset> {
        let text = std::fs::read_to_string(path)?;
        Dataset::from_csv(&text, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> FingerPhysicalModel {
        FingerPhysicalModel::default_with_seed(11)
    }

    #[test]
    fn default_protocol_yields_valid_ranges() {
        let data = Dataset::generate(&model(), &Protocol::default(), 0).unwrap();
        assert_eq!(data.len(), 1000);
        for s in &data.samples {
            assert!((0.0..=6.0).contains(&s.f_n));
            assert!(s.t_z.abs() <= 0.05);
            assert!((1.0..=10.0).contains(&s.p_index));
            assert!((0.0..=10.0).contains(&s.m_index));
            assert!(s.a.iter().all(|a| a.is_finite()));
        }
    }

    #[test]
    fn split_is_disjoint_exhaustive_800_200() {
        let data = Dataset::generate(&model(), &Protocol::default(), 3).unwrap();
        let train = data.indices_of(Split::Train);
        let test = data.indices_of(Split::Test);
        assert_eq!(train.len(), 800);
        assert_eq!(test.len(), 200);
        let mut all: Vec<usize> = train.iter().chain(test.iter()).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..1000).collect::<Vec<_>>());
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let a = Dataset::generate(&model(), &Protocol::default(), 7).unwrap();
        let b = Dataset::generate(&model(), &Protocol::default(), 7).unwrap();
        let c = Dataset::generate(&model(), &Protocol::default(), 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn empty_protocol_yields_empty_dataset() {
        let protocol = Protocol {
            n_points: 0,
            ..Protocol::default()
        };
        let data = Dataset::generate(&model(), &protocol, 0).unwrap();
        assert!(data.is_empty());
    }

    #[test]
    fn vertical_sweep_holds_three_newtons() {
        let data = Dataset::generate_vertical(&model(), &VerticalProtocol::default(), 0).unwrap();
        assert_eq!(data.len(), 100);
        for s in &data.samples {
            assert!((s.f_n - 3.0).abs() < 0.01, "force {} drifted", s.f_n);
        }
        // All ten vertical positions are visited.
        let mut seen: Vec<i64> = data.samples.iter().map(|s| s.v_index as i64).collect();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen, (1..=10).collect::<Vec<_>>());
    }

    #[test]
    fn vertical_sweep_rejects_unreachable_force() {
        let protocol = VerticalProtocol {
            constant_force_n: 7.0,
            ..VerticalProtocol::default()
        };
        assert!(matches!(
            Dataset::generate_vertical(&model(), &protocol, 0),
            Err(Error::Protocol(_))
        ));
    }

    #[test]
    fn zero_force_sweep_means_zero_feed() {
        let protocol = VerticalProtocol {
            constant_force_n: 0.0,
            n_points: 10,
            ..VerticalProtocol::default()
        };
        let data = Dataset::generate_vertical(&model(), &protocol, 0).unwrap();
        for s in &data.samples {
            assert_eq!(s.m_index, 0.0);
            assert_eq!(s.f_n, 0.0);
        }
    }

    #[test]
    fn csv_roundtrip_preserves_split_and_values() {
        let small = Protocol {
            n_points: 50,
            ..Protocol::default()
        };
        let data = Dataset::generate(&model(), &small, 5).unwrap();
        let text = data.to_csv();
        assert!(text.starts_with(CSV_HEADER));
        let back = Dataset::from_csv(&text, 5).unwrap();
        assert_eq!(back.len(), data.len());
        assert_eq!(back.split, data.split);
        for (a, b) in data.samples.iter().zip(&back.samples) {
            // Nine significant digits survive the trip.
            assert!((a.f_n - b.f_n).abs() <= 1e-7 * a.f_n.abs().max(1.0));
        }
        // A reparse of a rewrite is byte-identical.
        assert_eq!(back.to_csv(), text);
    }

    #[test]
    fn malformed_csv_reports_line_numbers() {
        let data = Dataset::generate(
            &model(),
            &Protocol {
                n_points: 3,
                ..Protocol::default()
            },
            0,
        )
        .unwrap();
        let mut text = data.to_csv();
        text.push_str("1.0,2.0,oops\n");
        match Dataset::from_csv(&text, 0) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
        match Dataset::from_csv("nonsense\n", 0) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected header error, got {other:?}"),
        }
    }

    #[test]
    fn feature_extraction_respects_column_subsets() {
        let data = Dataset::generate(
            &model(),
            &Protocol {
                n_points: 4,
                ..Protocol::default()
            },
            0,
        )
        .unwrap();
        let rows = vec![0, 2];
        let full = data.features(&rows, None);
        assert_eq!(full[0].len(), 5);
        let sub = data.features(&rows, Some(&[4, 0]));
        assert_eq!(sub[0], vec![full[0][4], full[0][0]]);
    }
}
