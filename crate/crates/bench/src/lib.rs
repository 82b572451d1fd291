//! Criterion benchmarks for the `polycoef` engines; see `benches/`.
