//! Configuration, presets, file output and property suites for the
//! `lagflow` command line tool.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod presets;
pub mod run;
pub mod suites;

pub use config::{parse_config, ConfigError, RunConfig};
pub use run::{run, Outcome};
