//! Criterion benchmarks for discretization, backward induction and Monte Carlo estimation; see `benches/`.
