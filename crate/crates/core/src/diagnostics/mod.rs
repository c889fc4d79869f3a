//! Monitored quantities, inequality checks and decay fits.

pub mod fit;
pub mod inequalities;
pub mod norms;
pub mod rate;
pub mod record;

pub use fit::{
    decay_fit, exponential_tail_fit, linear_fit, log_energy_check, moving_median3, perp_decay_fit,
    power_fit, trend, DecayFit, FitModel, LinearFit, LogEnergyReport, TrendReport,
};
pub use inequalities::{
    ladyzhenskaya_constant, ladyzhenskaya_ratio, oseen_difference_check, oseen_difference_exact,
    poincare_ratio, source_norm, source_term, OseenDifferenceReport, SourceNorm,
};
pub use norms::{norms, theorem_quantities, Norms};
pub use rate::{rate_study, RateData, RateStudy, RateStudyConfig};
pub use record::{DiagnosticsRecord, CSV_COLUMNS};
