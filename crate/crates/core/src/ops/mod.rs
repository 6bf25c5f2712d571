//! Operators on truncated homoclinic bases.

pub mod elements;
pub mod lemmas;
pub mod operator;
pub mod wg;

pub use operator::{PowerNorm, Sparse};
