//! Command-line frontend for the `ainf` library: subcommands, model files
//! and the artifact cache.

pub mod cache;
pub mod commands;
pub mod modelfile;
