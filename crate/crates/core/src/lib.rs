//! Synthesis, simulation and tuning of a second-order dual-mode bandstop
//! filter with varactor-tunable resonators.
//!
//! All quantities are SI (Hz, H, F, ohm, V). Engineering notation is only
//! handled in [`io::quantity`].

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod error;
pub mod io;
pub mod metrics;
pub mod optim;
pub mod synthesis;
pub mod topology;
pub mod tuning;
pub mod varactor;

pub use error::{Error, ErrorClass, Result};
