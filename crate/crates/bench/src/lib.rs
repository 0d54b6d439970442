//! Benchmark-only crate; see `benches/key_rates.rs`.
