//! Interdisciplinarity indicators for journals from aggregated citation
//! matrices: file formats, the indicator pipeline, reports and the CLI.

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod report;
pub mod synth;

pub use interdisc_core as core;
