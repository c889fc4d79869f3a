use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// One rejected configuration entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub section: String,
    pub key: String,
    pub message: String,
}

impl std::fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.key.is_empty() {
            write!(f, "[{}]: {}", self.section, self.message)
        } else {
            write!(f, "[{}] {}: {}", self.section, self.key, self.message)
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("configuration rejected ({} issue(s)):\n{}", .0.len(), join_issues(.0))]
    ConfigIssues(Vec<ConfigIssue>),

    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: String, found: String },

    #[error("non-finite value in {what}")]
    NonFinite { what: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("radial domain too small: |profile| = {value:.3e} at the outer boundary (tolerance {tolerance:.1e})")]
    DomainTooSmall { value: f64, tolerance: f64 },

    #[error("time step rejected {attempts} times at t = {t}: {reason}")]
    StepFailure { t: f64, attempts: usize, reason: String },

    #[error("instability at t = {t}: {reason}")]
    Unstable { t: f64, reason: String },

    #[error("malformed snapshot {path:?}: {reason}")]
    Snapshot { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join_issues(issues: &[ConfigIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("  - {i}"))
        .collect::<Vec<_>>()
        .join("\n")
}
