#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cylinder;
pub mod error;
pub mod greens;
pub mod heatkernels;
pub mod quad;
pub mod rearrange;
pub mod sharpness;
pub mod specfun;

pub use error::{Error, Result};
