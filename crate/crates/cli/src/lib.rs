//! Library side of the `resonance` binary: configuration, subcommands and writers.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
