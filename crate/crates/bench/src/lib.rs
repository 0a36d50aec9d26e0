//! Benchmark-only crate; the suites live under `benches/`.
//!
//! Run them with `cargo bench -p fibergrip-bench`.
