//! Library surface of the command-line tool: file formats and the command
//! implementations, kept importable so integration tests can drive them and
//! build fixture files.

pub mod commands;
pub mod formats;
