//! Empty library crate; the content lives in `benches/kernels.rs`.
