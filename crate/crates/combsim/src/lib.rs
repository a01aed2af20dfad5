//! File formats, reports and the `combsim` command line on top of
//! `combsim_core`.

pub mod cli;
pub mod config;
pub mod io;
pub mod report;

pub use cli::{run, Cli, Command, Format, Outcome};
pub use io::InputError;
