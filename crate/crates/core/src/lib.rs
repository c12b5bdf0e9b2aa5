//! Genuine multipartite Rains entanglement and related quantities for small
//! multipartite quantum states.
//!
//! The crate is `no_std` (it needs `alloc`) and has no I/O. The `gmre`
//! companion crate adds file formats and the command line.

#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod bounds;
pub mod entropy;
pub mod error;
pub mod feasible;
pub mod linalg;
pub mod monotone;
pub mod multistate;
pub mod random;
pub mod solver;
pub mod tfim;

pub use error::{Error, Result};
pub use linalg::{Matrix, C64};
pub use multistate::{Bipartition, DensityMatrix, PartyShape};
