//! Benchmarks for `qam-core`; see `benches/`.
