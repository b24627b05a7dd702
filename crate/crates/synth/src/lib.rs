//! File formats, dataset building and evaluation on top of `mor-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod manifest;
pub mod pipeline;
pub mod report;

pub use config::SynthConfig;
pub use error::{Result, SynthError};
pub use manifest::Manifest;
