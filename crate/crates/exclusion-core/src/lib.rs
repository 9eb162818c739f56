//! Spectral analysis of the unlabelled/labelled exclusion processes and the
//! interchange process on the complete graph.
//!
//! The crate is organized around six layers:
//!
//! * [`combin`] — exact binomial / falling-factorial arithmetic and their
//!   log-domain companions.
//! * [`state`] — enumeration, ranking and neighbor structure of the two state
//!   spaces (subsets for the unlabelled process, ordered tuples for the
//!   labelled one).
//! * [`generator`] — assembly of the symmetric rate matrices and the
//!   transposition Cayley adjacency matrices.
//! * [`spectral`] — the closed-form unlabelled spectrum, a dense eigen-oracle,
//!   the envelope recursion for the labelled spectrum, lift operators and the
//!   verification reports built on top of them.
//! * [`mixing`] — exact L2 distance-from-stationarity, mixing-time location,
//!   sandwich bounds and asymptotic profiles.
//! * [`evolution`] — exact heat-kernel evolution (spectral and uniformization
//!   routes) and continuous-time Monte Carlo simulation.
//!
//! The core is `no_std` + `alloc`; everything is a pure function over
//! immutable inputs and safe to call from any number of threads.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod combin;
pub mod evolution;
pub mod generator;
pub mod linalg;
pub mod mixing;
pub mod spectral;
pub mod state;

use alloc::string::String;
use core::fmt;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its documented range.
    InvalidParameter(String),
    /// The requested computation would exceed exact-integer or dense-solver
    /// capacity.
    Capacity(String),
    /// A vector or matrix has the wrong dimension for the operation.
    Dimension { expected: usize, got: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Capacity(msg) => write!(f, "capacity exceeded: {msg}"),
            Error::Dimension { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
        }
    }
}

#[cfg(test)]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
