//! Simulation toolkit for classical and quantum digital signature schemes.

pub mod bits;
pub mod cli;
pub mod error;
pub mod field;
pub mod gc_qds;
pub mod hanaoka;
pub mod harness;
pub mod mqds;
pub mod p2;
pub mod quantum;
pub mod rng;
pub mod threshold;

pub use error::{Error, Result};
