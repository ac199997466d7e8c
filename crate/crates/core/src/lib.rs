//! Certified bound evaluation and desk-scale experimental verification for
//! effective Bertini theorems over finite fields.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod gf;
pub mod groebner;
pub mod harness;
pub mod polyring;
pub mod rigor;
pub mod scheme;
pub mod zeta;

pub use error::{Error, Result};
