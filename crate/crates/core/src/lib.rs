//! Constructive solver for a Tricomi-type problem for a mixed equation that
//! is fractional-parabolic (Riemann-Liouville in `y`) above the line `y = 0`
//! and degenerate hyperbolic of the second kind below it.

// range checks are written `!(x > a)` so that NaN inputs are rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod fracops;
pub mod functions;
pub mod hyperbolic;
pub mod ode_bvp;
pub mod parabolic;
pub mod pipeline;
pub mod quadrature;
pub mod specfun;
pub mod verify;
pub mod volterra;

pub use error::{Error, Result};
