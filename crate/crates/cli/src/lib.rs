//! Command-line front end for `scriptswap-core`: JSON config ingestion,
//! table/JSON/CSV rendering, parallel simulation and sweeps, and the
//! verification battery.

// `!(x <= y)` is used on purpose so that NaN falls on the failing side
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod sample;
pub mod verify;

pub use config::{Overrides, RunConfig};
pub use error::{exit, CliError, Result};
pub use format::Format;
