//! Criterion benchmarks for the solver and privatizer; see `benches/`.
