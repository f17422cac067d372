//! Criterion benchmarks for the `lwpm` kernels; see `benches/`.
