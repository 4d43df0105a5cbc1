//! Criterion benchmarks for `ftfreq-core`; see `benches/`.
