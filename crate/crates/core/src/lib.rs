//! Exact simulation of quantum Fourier-sampling property testers for hidden
//! group properties: periodicity beyond a known normal subgroup and common
//! coset range.

pub mod error;
pub mod group;
pub mod lowerbound;
pub mod oracle_gen;
pub mod qsim;
pub mod rng;
pub mod testers;
pub mod verify;

pub use error::{Error, Result};

/// Exact rational used for distances and state norms.
pub type Fraction = num_rational::Ratio<u128>;
