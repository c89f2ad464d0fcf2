//! Command-line front end: run configuration, trajectory CSV tables, static
//! SVG charts, cross-model comparison, analysis reports, and q sweeps.

pub mod config;
pub mod csv_io;
pub mod run;
pub mod svg;

pub use config::{parse_config, parse_config_with, CliError, Mode, Overrides, RunConfig};
pub use run::{run, RunReport};
