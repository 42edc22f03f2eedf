//! Clipped separable multiple neural operators.

// `!(x > 0.0)` guards reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod harness;
pub mod mno;
pub mod prescribe;
pub mod relu_net;
pub mod sampling;
pub mod zoo;

pub use error::{Error, Result};
