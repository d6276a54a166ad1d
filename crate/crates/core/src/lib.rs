//! Tikhonov regularization on diagonal sequence-space models, with tools for
//! measuring image-space approximation rates, defects, variational source
//! conditions and convergence-rate exponents.

// `!(v > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod forward;
pub mod grid;
pub mod harness;
pub mod sequences;
pub mod tikhonov;

pub use error::{Result, VarregError};
