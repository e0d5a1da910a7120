//! Library side of the `densprog` command-line harness.

pub mod checks;
pub mod commands;
pub mod config;
