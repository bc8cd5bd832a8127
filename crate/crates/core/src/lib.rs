//! Link-level simulation of large MIMO systems with non-binary LDPC coding
//! over GF(256) and low-complexity matched-filter soft detection.

pub mod analysis;
pub mod detect;
pub mod error;
pub mod gf256;
pub mod mimo;
pub mod nbldpc;

pub use error::{Error, Result};
pub use gf256::{Field, FieldElement};
