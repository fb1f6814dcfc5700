//! Generalized two-qubit Hilbert-Schmidt separability probabilities.
//!
//! The crate computes the separability/PPT probabilities of 4x4 (and 6x6)
//! random density matrices four independent ways and validates them against
//! each other and against a parallel Monte Carlo engine:
//!
//! - [`prob::prob_dunkl_exact`]: exact finite double sum (even Dyson index d)
//! - [`prob::prob_concise`]: convergent series over shifted gamma ratios
//! - [`prob::prob_induced_6f5`]: unit-argument 6F5 with sequence acceleration
//! - [`prob::prob_via_t_integral`]: quadrature of a hypergeometric product
//! - [`prob::prob_ansatz_2d`]: double integral over the eigenvalue-like
//!   triangle, weighted by a separability function
//!
//! The separability functions chi_d live in [`chi`]; random-state sampling,
//! the Peres-Horodecki partial-transpose test and ratio variables in
//! [`states`]; streaming binned estimation in [`harness`]; the closed-form
//! jacobian identities and the full cross-check battery in [`verify`].
//!
//! Exact arithmetic is [`rational::Rational`] (arbitrary-precision, always
//! reduced); numeric work uses [`real::BigReal`] at a configurable binary
//! precision (default 256 bits, see [`real::Prec`]).

pub mod accel;
pub mod chi;
pub mod cli;
pub mod error;
pub mod gamma;
pub mod harness;
pub mod hyper;
pub mod polylog;
pub mod prob;
pub mod quad;
pub mod rational;
pub mod real;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use rational::Rational;
pub use real::{BigReal, Prec};
