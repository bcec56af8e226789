//! Superintegrable potentials built from the fourth Painlevé transcendent.
//!
//! The crate derives bound-state spectra three ways: from unitary
//! representations of a cubic algebra, from third-order SUSY ladder
//! operators, and from a finite-difference Schrödinger solver used as an
//! oracle. Everything here is `no_std` with `alloc`.
#![no_std]
// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cubic_algebra;
pub mod eigen;
pub mod error;
pub mod grid;
pub mod jet;
pub mod params;
pub mod potentials;
pub mod special;
pub mod susy;
pub mod verify;

pub use error::{Error, Result};
pub use params::{CaseId, Epsilon, ModelParams};
pub use special::{P4Params, P4Solution};
