//! Shared inputs for the engine benchmarks.
