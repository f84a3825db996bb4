//! Computational toolkit around least primitive roots modulo primes.
//!
//! The crate provides exact 64-bit modular arithmetic ([`arith`]), a numerical
//! evaluator for the Dickman–de Bruijn function ρ and its inverse ([`dickman`]),
//! power-residue search and smooth-number counting ([`residues`]), discrete
//! logarithms and the Jacobsthal function ([`structure`]), an explicit
//! construction of simultaneous power non-residues ([`constructor`]), and a
//! prime-sweep statistics harness ([`survey`]).
//!
//! The central object is the construction in [`constructor::construct_simultaneous_nonresidue`]:
//! given an odd prime p, it assembles an element of (ℤ/pℤ)* that is a q-th
//! power non-residue for every prime q | p−1 — hence a primitive root — as a
//! short product of least q-th power non-residues, and evaluates the exponent
//! bounds that govern its size.

pub mod arith;
pub mod constructor;
pub mod dickman;
pub mod jsonfmt;
pub mod notation;
pub mod residues;
pub mod structure;
pub mod survey;

/// Crate-wide error type.
///
/// The variants mirror the failure classes of the public operations: domain
/// errors for invalid inputs, range errors for inputs beyond a table or grid,
/// capacity errors for inputs beyond the configured desk-scale budgets, and
/// contract errors for internal self-check violations (these indicate a bug
/// and carry diagnostic context).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }
    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
