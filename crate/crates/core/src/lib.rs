//! Exact computations around the additive energy of integer polynomial sequences:
//! energy counts, finite-field exponential sums, congruence root counts, line and
//! singularity classification, and the polynomial sieve.

pub mod congruence;
pub mod energy;
pub mod error;
pub mod ffield;
pub mod fit;
pub mod geometry;
pub mod instances;
pub mod polyarith;
mod ser;
pub mod sieve;

pub use error::{Error, Result};
