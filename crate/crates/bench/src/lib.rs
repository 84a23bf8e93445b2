//! Benchmark harness for the sequence pipeline; see `benches/`.
