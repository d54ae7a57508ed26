//! Criterion benchmarks for `accelphase`; see `benches/`.
