//! Numerical toolkit for one-dimensional Hardy inequalities: sharp and
//! improved forms, doubly weighted constants, duality functionals,
//! changes of variables, and spectral certificates for radial Schrödinger
//! operators.

// `!(x > 0.0)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod duality;
pub mod error;
pub mod gridfn;
pub mod hardy;
pub mod real;
pub mod schrodinger;
pub mod sharp;
pub mod transform;

pub use error::{Error, Result};
