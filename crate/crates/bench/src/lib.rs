//! Criterion benchmarks for padlock-core; see `benches/`.
