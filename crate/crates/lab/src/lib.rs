//! Experiment runner around the sieve-function core: configuration,
//! sweep orchestration, exponent regression, and record persistence.

pub mod config;
pub mod fit;
pub mod identities;
pub mod io;
pub mod record;
pub mod sweep;

pub use config::SweepConfig;
pub use record::RunRecord;
