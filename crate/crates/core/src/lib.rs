//! Finite braces and module braces over Galois rings.

pub mod abelian;
pub mod arith;
pub mod error;
pub mod finite_ring;
pub mod galois_ring;
pub mod module;
pub mod brace;
pub mod radical_ring;
pub mod series;
pub mod analysis;
pub mod enumeration;
pub mod document;
pub mod demos;

pub use error::{Error, Result};

/// Environment variable overriding the global size bound.
pub const SIZE_BOUND_VAR: &str = "MODBRACE_SIZE_BOUND";

/// `default`, unless overridden by `MODBRACE_SIZE_BOUND`.
pub fn size_bound(default: usize) -> usize {
    std::env::var(SIZE_BOUND_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(default)
}
