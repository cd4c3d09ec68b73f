// Comparisons are written as `!(a > b)` on purpose throughout: a NaN must
// fail the check rather than slip through it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod bifurcation;
pub mod error;
pub mod export;
pub mod linear_modes;
pub mod nondim;
pub mod numerics;
pub mod oracle;
pub mod steady_state;
pub mod verify;

pub use error::{Error, Result};
