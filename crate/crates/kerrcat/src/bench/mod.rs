//! Benchmarking (stub).
