//! Library side of the `ietflow` binary: run configurations, commands and
//! run manifests.

pub mod cli;
pub mod commands;
pub mod config;
pub mod manifest;

pub use cli::run;
