pub mod axioms;
pub mod desk;
pub mod error;
pub mod model;
pub mod ops;
pub mod orbit;
pub mod partition;
pub mod projection;
pub mod runner;
