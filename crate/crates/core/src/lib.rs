//! Coverage analysis of dense multi-antenna Poisson networks.
//!
//! When the desired-signal gain is gamma distributed, the coverage
//! probability conditioned on the serving distance equals the sum of the
//! first column of `exp(Q)`, where `Q` is a lower-triangular Toeplitz matrix
//! built from the scaled derivatives of the Laplace exponent of
//! interference plus noise. This crate provides:
//!
//! * [`specfun`]: gamma, Gauss and generalized hypergeometric functions;
//! * [`toeplitz`]: first-column algebra of lower-triangular Toeplitz matrices;
//! * [`framework`]: the general evaluator, quadrature and root finding;
//! * [`hetnet`], [`security`], [`mmwave`]: three network models built on it;
//! * [`montecarlo`]: a simulator of the exact SINR model used as an oracle.

// `!(x > 0.0)` style guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod framework;
pub mod hetnet;
pub mod mmwave;
pub mod montecarlo;
pub mod oracle;
pub mod security;
pub mod specfun;
pub mod toeplitz;

pub use error::{Error, Result};
pub use framework::{
    coverage_theorem1, CoverageResult, GainLaw, GammaGain, InterfererClass, Method, Radius,
    Scenario, ServingDistance,
};
pub use toeplitz::{Column, ToeplitzLT};

/// Converts a decibel value to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
