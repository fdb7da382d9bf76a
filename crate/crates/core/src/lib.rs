//! Finite-horizon certificates for modes of convergence on one-dimensional
//! Lebesgue measure spaces.
//!
//! The crate represents measurable functions as piecewise sums of power
//! terms and checks convergence in measure, asymptotic `L_p`-convergence,
//! convergence in weak `L_p` and membership in the almost-`L_p` space. Every
//! verdict carries the evidence it was derived from: superlevel sets,
//! witness sets, integrals and the decision rule parameters.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod convergence;
pub mod error;
pub mod func;
pub mod gallery;
pub mod input;
pub mod measure;
pub mod oracle;
pub mod weak;
mod par;

pub use error::{Error, Result};
