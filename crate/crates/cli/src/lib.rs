//! Std companion of `sparse-hdc`: file formats, synthetic recordings and
//! the command implementations behind the `sparse-hdc` binary.

pub mod am_file;
pub mod cli;
pub mod commands;
pub mod config;
pub mod csv_import;
pub mod error;
pub mod im_file;
pub mod recording_file;
pub mod report;
pub mod synth;

pub use error::{CliError, Result};
