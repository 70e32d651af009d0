//! Configuration, drivers and CSV output behind the `fgle` binary.
//!
//! See the repository README for the configuration schema.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod run;
pub mod verify;

pub use config::{parse_config, to_toml, ConfigError, Mode, RunConfig};
pub use run::{execute, Gate, RunOptions, RunOutcome};
