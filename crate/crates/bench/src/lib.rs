//! Criterion benchmarks for `passrev`; see `benches/`.
