// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod codes;
pub mod engines;
pub mod error;
pub mod ion;
pub mod opcore;
pub mod pipeline;

pub use error::{Error, Result};
