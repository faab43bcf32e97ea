//! Monte-Carlo simulator for physical-layer secrecy in massive MIMO
//! downlinks and for detecting pilot-contamination attacks.

// `!(x > 0.0)` style checks are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod cli;
pub mod detectors;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod secrecy;
pub mod stats;

pub use error::{Error, Result};
