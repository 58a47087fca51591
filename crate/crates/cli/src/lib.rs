//! Experiment driver behind the `costcast` binary: manifest parsing, the
//! `run`, `sweep` and `analyze` commands, and atomic CSV output.

pub mod commands;
pub mod manifest;
pub mod output;
