//! Benchmark fixtures live in `afr_core::gen`; this crate only hosts criterion targets.
