//! Simulation and verification toolkit for classical and quantum
//! statistical-query learning of symmetric Boolean function classes.

pub mod analysis;
pub mod bitdomain;
pub mod concepts;
pub mod error;
pub mod formats;
pub mod learners;
pub mod oracles;
pub mod quantum;
pub mod symmetry;

pub use error::{Error, Result};
