//! Random dynamics of two piecewise-affine interval maps.

// `!(x > 0.0)` style checks are there to reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod conjugacy;
pub mod dynamics;
pub mod error;
pub mod format;
pub mod measure;
pub mod resonant;
pub mod rng;
pub mod roots;
pub mod system;

pub use error::{Error, Result};
pub use system::{AmSystem, Endpoint, ResonantSystem, Sign, SystemClass, SystemSpec};
