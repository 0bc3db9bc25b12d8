//! Certified lower and upper bounds on capacities of 1- and 2-dimensional
//! constrained systems.
//!
//! The library computes weighted strip transfer matrices, the auxiliary
//! graph behind the generalized Calkin–Wilf lower bound, max-entropic and
//! optimized window weightings, exact capacities for two constraint
//! families, and a brute-force counting oracle everything else is tested
//! against.

pub mod bounds;
pub mod constraint;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod phi;
pub mod presets;
pub mod report;
pub mod spectral;

pub use error::{CapError, Result};
