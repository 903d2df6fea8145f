//! Command-line front end for `freqborn-core`.
//!
//! Each subcommand builds a [`output::Report`] of named tables that is
//! written as versioned CSV or JSON.

pub mod cli;
pub mod commands;
pub mod error;
pub mod output;
pub mod parse;
pub mod wavefunction;
