//! Configuration, snapshots, CSV and reports.

pub mod config;
pub mod csv;
pub mod report;
pub mod snapshot;

pub use config::{ExperimentConfig, InitialKind};
pub use report::{CheckResult, PresetReport};
pub use snapshot::Snapshot;
