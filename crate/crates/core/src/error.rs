//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the evaluation routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Gamma function evaluated at a non-positive integer.
    #[error("gamma pole at z = {re}{im:+}i")]
    Pole { re: f64, im: f64 },

    /// pFq series with p > q+1 diverges for every nonzero argument.
    #[error("series {p}F{q} diverges for nonzero argument")]
    Divergence { p: usize, q: usize },

    /// pFq series with p = q+1 outside its unit disc of convergence.
    #[error("series {p}F{q} does not converge at |z| = {abs_z} >= 1")]
    Convergence { p: usize, q: usize, abs_z: f64 },

    /// Series truncation cap reached before the tail bound was met.
    #[error("series not converged after {terms} terms")]
    NonConverged { terms: usize },

    /// Parameters outside the validity region of a kernel or operator.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input function decays too slowly for the requested integral.
    #[error("decay error: {0}")]
    Decay(String),

    /// Quadrature failed to reach the requested tolerance.
    #[error("quadrature tolerance not met: estimated error {estimate:.3e} > target {target:.3e}")]
    Quadrature { estimate: f64, target: f64 },

    /// Mellin variable outside the convergence strip.
    #[error("Re(s) = {re_s} outside Mellin strip ({lower}, {upper})")]
    Strip { re_s: f64, lower: f64, upper: f64 },

    /// Inverse-Mellin contour still carries mass at the truncation bound.
    #[error("contour tail at |Im s| = {h_max} still contributes {tail:.3e}")]
    Truncation { h_max: f64, tail: f64 },

    /// Invalid user-facing configuration (CLI or registry strings).
    #[error("validation error: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
