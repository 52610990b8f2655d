//! Exact and asymptotic negativity spectra for two intervals of free
//! lattice fermions.
//!
//! The exact side builds the reduced covariance matrix of two disjoint
//! intervals over a Fermi-sea ground state, applies the partial-transpose
//! deformation to one interval, and diagonalizes the resulting dense
//! complex matrix. The asymptotic side evaluates the Fisher-Hartwig-type
//! predictions for the same spectrum: mean eigenvalue density, individual
//! eigenvalue locations from a transcendental phase condition, the
//! decoupling (far-separated) limit, and closed-form logarithmic
//! negativity at half filling.

pub mod asymptotics;
pub mod cli;
pub mod contour;
pub mod deform;
pub mod gamma;
pub mod lattice;
pub mod linalg;
pub mod parallel;
pub mod spectra;

use std::fmt;

/// Crate-wide error type.
#[derive(Debug)]
pub enum Error {
    /// Bad user-facing input: geometry, filling fraction, config keys.
    InvalidInput(String),
    /// Argument outside the mathematical domain of a formula.
    Domain(String),
    /// Unpivoted elimination hit a vanishing leading pivot; the shift is
    /// (numerically) on the spectrum of a leading submatrix.
    PivotFailure { index: usize, magnitude: f64 },
    /// Iterative eigensolver exceeded its sweep cap.
    NonConvergence(String),
    /// Two independent evaluation routes disagreed beyond tolerance.
    Inconsistent(String),
    /// Adaptive quadrature failed to reach the requested tolerance.
    Quadrature(String),
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::PivotFailure { index, magnitude } => {
                write!(f, "pivot failure at step {index}: |pivot| = {magnitude:.3e}")
            }
            Error::NonConvergence(m) => write!(f, "no convergence: {m}"),
            Error::Inconsistent(m) => write!(f, "cross-check mismatch: {m}"),
            Error::Quadrature(m) => write!(f, "quadrature failure: {m}"),
            Error::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
