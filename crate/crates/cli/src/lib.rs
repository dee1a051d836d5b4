//! Experiment runner library behind the `ergolab` binary: configuration
//! schema, validation, deterministic execution and versioned result
//! records.

pub mod config;
pub mod record;
pub mod runner;

pub use config::{validate, Diagnostic, ExperimentConfig, ExperimentKind, FunctionSpec, PointSpec, Severity};
pub use record::{payload_hash, ResultRecord};
pub use runner::run;
