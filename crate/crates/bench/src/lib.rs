//! Criterion benchmarks for `rrk-core`; see `benches/`.
