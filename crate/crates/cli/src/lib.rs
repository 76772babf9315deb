//! File formats, command-line front end and parameter sweeps for [`qubit_md`].

pub mod closed_form;
pub mod commands;
pub mod file;
pub mod report;
pub mod sweep;

pub use commands::{cmd_solve, cmd_sweep, cmd_verify, Flags};
pub use file::{EnsembleFile, FileError, MemberEntry};
