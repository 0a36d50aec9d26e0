//! Deterministic derivation of independent RNG streams from one run seed.
//!
//! Every randomized stage (noise, dataset shuffling, fold assignment, tree
//! construction, ...) draws from its own stream so that adding or reordering
//! stages never perturbs the others. Streams are derived with splitmix64,
//! which is a bijective finalizer: distinct `(seed, domain)` pairs map to
//! distinct stream seeds.

/// Well-separated domain tags for the streams used across the crate.
pub mod domain {
    pub const SENSOR_NOISE: u64 = 1;
    pub const MAIN_DATASET: u64 = 2;
    pub const VERTICAL_DATASET: u64 = 3;
    pub const FOLDS: u64 = 4;
    pub const FOREST: u64 = 5;
    pub const STREAM: u64 = 6;
    /// Per-fold model refits during cross-validation start here.
    pub const CV_FIT_BASE: u64 = 100;
}

/// splitmix64 finalizer step.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the seed of an independent child stream.
pub fn subseed(seed: u64, domain: u64) -> u64 {
    splitmix64(splitmix64(seed).wrapping_add(domain))
}
