//! Dwork-style p-adic computations on Laurent polynomials.

pub mod arith;
pub mod cartier;
pub mod cy;
pub mod error;
pub mod harness;
pub mod hasse_witt;
pub mod laurent;
pub mod par;
pub mod polytope;
pub mod zeta;

pub use error::{Error, Result};
