//! Library half of the `qclone` binary: argument types, command
//! implementations and CSV/TSV output.

pub mod args;
pub mod commands;
pub mod table;
pub mod verify;

pub use commands::{run, CliError};
