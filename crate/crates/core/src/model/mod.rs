//! Smale-space contract and its two concrete realizations.

pub mod quadratic;
pub mod sft;
pub mod space;
pub mod torus;

pub use quadratic::QuadraticNumber;
pub use sft::{SftModel, SftPoint};
pub use space::{ScaledMetric, SmaleSpace, SwappedBracket};

pub use torus::{TorusModel, TorusPoint};
