//! Criterion benchmarks for `sbo-core`: family construction, operator equality and identity suites.
//! Run them with `cargo bench -p sbo-bench`.
