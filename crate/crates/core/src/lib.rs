//! Erdélyi–Kober fractional integral operators from a statistical angle:
//! kernel densities, direct quadrature evaluation, Mellin multipliers with
//! contour inversion, and Monte Carlo verification of the product/ratio
//! density identities.

pub mod cli;
pub mod density;
pub mod error;
pub mod mellin;
pub mod operator;
pub mod quad;
pub mod special;
pub mod stochastic;

pub use error::{Error, Result};
