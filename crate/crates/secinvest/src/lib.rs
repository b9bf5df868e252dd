//! Config files, experiment pipelines, result records and the command line
//! for `secinvest-core`.

pub mod checks;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod records;
pub mod suite;
pub mod sweep;

pub use config::ExperimentConfig;
pub use error::AppError;
