//! Command-line front end for the `framemult` library.

pub mod commands;
pub mod config;
pub mod error;
pub mod suite;
