//! Simulation and exact analysis of the facilitated totally asymmetric simple
//! exclusion process.

pub mod dynamics;
#[cfg(feature = "cli")]
pub mod experiments;
pub mod lattice;
pub mod limits;
pub mod mappings;
pub mod measures;
pub mod rng;
