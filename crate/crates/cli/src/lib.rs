//! Report assembly and rendering behind the `darboux` command.

pub mod config;
pub mod portrait;
pub mod report;
