//! Command-line front end for the `rvw` verifiers.
//!
//! [`run`] parses arguments, dispatches to the core crate and renders one
//! JSON report, so tests can drive the whole binary in-process.

pub mod app;
mod commands;
pub mod input;
pub mod parse;

pub use app::{run, Cli, Outcome};
