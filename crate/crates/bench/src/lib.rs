//! Criterion benchmarks for the forest, network and pipeline stages live in `benches/`.
