//! Command-line front end: file formats, result documents and subcommands.

pub mod commands;
pub mod document;
pub mod format;
