// `!(x > 0.0)` is used to reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dpa;
pub mod eval;
pub mod error;
pub mod hill;
pub mod linalg;
pub mod phv;
pub mod rom;
pub mod sadpa;
pub mod systems;
pub mod trigfun;

pub use error::{Error, Result};
