//! Library surface of the `igmrf` command-line tool.
//!
//! The binary in `main.rs` is a thin clap wrapper over [`commands`]; the
//! table-generation code is shared with the acceptance test suite.

pub mod commands;
pub mod output;
