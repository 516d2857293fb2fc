//! IO, experiment harness and command-line front end for
//! [`wavecauchy_core`].

pub mod bench;
pub mod checks;
pub mod cli;
pub mod config;
pub mod data;
pub mod results;
pub mod trace_io;

pub use wavecauchy_core as core;
