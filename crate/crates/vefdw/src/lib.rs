//! Solvers for the variable-exponent fractional diffusion-wave equation
//!
//! The model is a time-fractional diffusion-wave equation whose Caputo-type
//! order `alpha(t)` varies in `(1, 2)` over time. After convolving with a
//! fractional kernel the equation takes a transformed form driven by a
//! "generalized identity function" `g(t)` (identically 1 for constant
//! exponents), a fractional integral of order `abar = alpha(0) - 1`, and the
//! original data. This crate discretizes that transformed form with
//! piecewise-linear finite elements in space and two time stepping schemes:
//!
//! * an `alpha(0)`-order scheme built from BDF2, a piecewise-linear
//!   treatment of the `g'` history term, and second-order convolution
//!   quadrature for the fractional integral ([`schemes`]);
//! * a second-order scheme built from step averaging, the midpoint rectangle
//!   rule for the `g'` term, and the averaged product-integration rule for
//!   the fractional integral ([`schemes`]).
//!
//! The [`harness`] module measures self-convergence errors and rates in time
//! and space and drives the transition-behavior demonstration; [`presets`]
//! holds the canonical experiment configurations.

pub mod error;
pub mod exponent;
pub mod fem;
pub mod harness;
pub mod linalg;
pub mod presets;
pub mod problem;
pub mod quadrature;
pub mod schemes;
pub mod special;
pub mod weights;

pub use error::Error;
