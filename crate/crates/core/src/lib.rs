//! Block calculus for positive-definite families on discrete duals.
//!
//! Families are indexed by irreducible labels, convolution acts blockwise,
//! and semigroups, cocycles and conditionally free products are built and
//! checked from their blocks. The crate needs only `alloc`.

#![no_std]
extern crate alloc;

pub mod cfree;
pub mod classical;
pub mod cocycle;
pub mod error;
pub mod fourier;
pub mod genfun;
pub mod irreps;
pub mod linalg;
pub mod report;

pub use error::{Error, Result};
