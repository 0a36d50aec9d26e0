//! Regression trees grown by recursive variance-reduction splitting.
//!
//! Split thresholds are midpoints between adjacent distinct feature values,
//! candidates are scanned in ascending feature index and ascending threshold,
//! and only a strictly better squared-error reduction displaces the current
//! best. Ties therefore resolve to the lowest feature index, then the lowest
//! threshold, which makes the grown tree independent of iteration order and
//! reproducible across runs.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Growth limits for one tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeParams {
    /// Maximum split depth; `None` grows until leaves are pure or too small.
    pub max_depth: Option<usize>,
    /// Minimum samples each side of a split must keep.
    pub min_samples_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_samples_leaf: 1,
        }
    }
}

impl TreeParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_samples_leaf == 0 {
            return Err(Error::argument("min_samples_leaf must be at least 1"));
        }
        if self.max_depth == Some(0) {
            return Err(Error::argument("max_depth of 0 cannot hold a split"));
        }
        Ok(())
    }
}

/// One node of a fitted tree. Splits record the squared-error reduction they
/// achieved so importance can be read back off the structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeNode {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        gain: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

/// A fitted regression tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: TreeNode,
    pub n_features: usize,
}

/// Best split found for one node, if any.
struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
    /// Row indices going to the left child (feature value <= threshold).
    left_rows: Vec<usize>,
    right_rows: Vec<usize>,
}

fn mean(y: &[f64], rows: &[usize]) -> f64 {
    rows.iter().map(|&r| y[r]).sum::<f64>() / rows.len() as f64
}

/// Sum of squared deviations from the node mean.
fn node_sse(y: &[f64], rows: &[usize]) -> f64 {
    let m = mean(y, rows);
    rows.iter().map(|&r| (y[r] - m).powi(2)).sum()
}

/// Scan one feature for the best threshold. Rows are sorted by feature value
/// and left/right sums are updated incrementally, so the scan is a single
/// pass after the sort.
fn scan_feature(
    x: &[Vec<f64>],
    y: &[f64],
    rows: &[usize],
    feature: usize,
    min_leaf: usize,
    parent_sse: f64,
    best: &mut Option<BestSplit>,
) {
    let mut order: Vec<usize> = rows.to_vec();
    order.sort_by(|&a, &b| x[a][feature].total_cmp(&x[b][feature]));

    let n = order.len();
    let total_sum: f64 = order.iter().map(|&r| y[r]).sum();
    let total_sq: f64 = order.iter().map(|&r| y[r] * y[r]).sum();

    let mut left_sum = 0.0;
    let mut left_sq = 0.0;
    for cut in 1..n {
        let r = order[cut - 1];
        left_sum += y[r];
        left_sq += y[r] * y[r];

        let lo = x[order[cut - 1]][feature];
        let hi = x[order[cut]][feature];
        if lo == hi {
            continue; // identical values cannot be separated
        }
        if cut < min_leaf || n - cut < min_leaf {
            continue;
        }
        let right_sum = total_sum - left_sum;
        let right_sq = total_sq - left_sq;
        let nl = cut as f64;
        let nr = (n - cut) as f64;
        // SSE = sum(y^2) - (sum y)^2 / n for each side.
        let children_sse =
            (left_sq - left_sum * left_sum / nl) + (right_sq - right_sum * right_sum / nr);
        let gain = parent_sse - children_sse;
        let improves = match best {
            Some(b) => gain > b.gain,
            None => gain > 0.0,
        };
        if improves {
            let threshold = lo + 0.5 * (hi - lo);
            *best = Some(BestSplit {
                feature,
                threshold,
                gain,
                left_rows: order[..cut].to_vec(),
                right_rows: order[cut..].to_vec(),
            });
        }
    }
}

fn grow(
    x: &[Vec<f64>],
    y: &[f64],
    rows: &[usize],
    depth: usize,
    params: &TreeParams,
    subsample: &mut Option<(&mut ChaCha8Rng, usize)>,
) -> TreeNode {
    let leaf = |rows: &[usize]| TreeNode::Leaf {
        value: mean(y, rows),
    };

    if rows.len() < 2 * params.min_samples_leaf {
        return leaf(rows);
    }
    if let Some(limit) = params.max_depth {
        if depth >= limit {
            return leaf(rows);
        }
    }
    let first = y[rows[0]];
    if rows.iter().all(|&r| y[r] == first) {
        return leaf(rows);
    }

    let d = x[0].len();
    // Candidate features for this split, always scanned in ascending index so
    // tie-breaking stays deterministic whether or not subsampling is on.
    let candidates: Vec<usize> = match subsample {
        Some((rng, k)) => {
            let mut pool: Vec<usize> = (0..d).collect();
            let take = (*k).min(d);
            // Partial Fisher-Yates: the first `take` entries become the draw.
            for i in 0..take {
                let j = i + (rand::Rng::gen_range(&mut **rng, 0..(d - i)));
                pool.swap(i, j);
            }
            let mut chosen = pool[..take].to_vec();
            chosen.sort_unstable();
            chosen
        }
        None => (0..d).collect(),
    };

    let parent_sse = node_sse(y, rows);
    let mut best: Option<BestSplit> = None;
    for &feature in &candidates {
        scan_feature(x, y, rows, feature, params.min_samples_leaf, parent_sse, &mut best);
    }

    match best {
        Some(split) => TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            gain: split.gain,
            left: Box::new(grow(x, y, &split.left_rows, depth + 1, params, subsample)),
            right: Box::new(grow(x, y, &split.right_rows, depth + 1, params, subsample)),
        },
        None => leaf(rows),
    }
}

impl DecisionTree {
    /// Fit on every row of `x` with all features available at every split.
    pub fn fit(x: &[Vec<f64>], y: &[f64], params: &TreeParams) -> Result<DecisionTree> {
        let rows: Vec<usize> = (0..x.len()).collect();
        DecisionTree::fit_on_rows(x, y, &rows, params, None)
    }

    /// Fit on a row subset, optionally restricting each split to a fresh
    /// random draw of `max_features` candidate features. This is the entry
    /// point ensembles use; `rows` may repeat indices (bootstrap draws).
    pub fn fit_on_rows(
        x: &[Vec<f64>],
        y: &[f64],
        rows: &[usize],
        params: &TreeParams,
        mut subsample: Option<(&mut ChaCha8Rng, usize)>,
    ) -> Result<DecisionTree> {
        params.validate()?;
        if x.is_empty() || x.len() != y.len() {
            return Err(Error::argument(
                "fit requires matching, non-empty features and targets",
            ));
        }
        let d = x[0].len();
        if d == 0 || x.iter().any(|row| row.len() != d) {
            return Err(Error::argument("feature rows must share a non-zero width"));
        }
        if rows.is_empty() || rows.iter().any(|&r| r >= x.len()) {
            return Err(Error::argument("row subset is empty or out of range"));
        }
        if let Some((_, k)) = &subsample {
            if *k == 0 {
                return Err(Error::argument("per-split feature draw must be at least 1"));
            }
        }
        let root = grow(x, y, rows, 0, params, &mut subsample);
        Ok(DecisionTree { root, n_features: d })
    }

    pub fn predict_one(&self, x: &[f64]) -> f64 {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn predict(&self, x: &[Vec<f64>]) -> Vec<f64> {
        x.iter().map(|row| self.predict_one(row)).collect()
    }

    /// Add each split's squared-error reduction to `acc[feature]`.
    pub fn accumulate_gains(&self, acc: &mut [f64]) {
        fn walk(node: &TreeNode, acc: &mut [f64]) {
            if let TreeNode::Split {
                feature,
                gain,
                left,
                right,
                ..
            } = node
            {
                acc[*feature] += gain.max(0.0);
                walk(left, acc);
                walk(right, acc);
            }
        }
        walk(&self.root, acc);
    }

    pub fn depth(&self) -> usize {
        fn walk(node: &TreeNode) -> usize {
            match node {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(left).max(walk(right)),
            }
        }
        walk(&self.root)
    }

    pub fn leaf_count(&self) -> usize {
        fn walk(node: &TreeNode) -> usize {
            match node {
                TreeNode::Leaf { .. } => 1,
                TreeNode::Split { left, right, .. } => walk(left) + walk(right),
            }
        }
        walk(&self.root)
    }
}
