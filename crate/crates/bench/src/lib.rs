//! Criterion benchmarks for quadtune live under `benches/`.
