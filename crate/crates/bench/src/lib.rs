//! Benchmarks live in `benches/`; run them with `cargo bench -p deuber-bench`.

pub use deuber_core as core;
