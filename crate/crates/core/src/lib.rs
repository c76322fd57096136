//! Planning and validation of truncated-series models of
//! phi-sub-Gaussian processes on `[0, T]`.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod minimize;
pub mod orlicz;
pub mod planner;
pub mod process;
pub mod quad;
pub mod simulate;
pub mod special;
pub mod validate;

pub use error::{Error, Result};
