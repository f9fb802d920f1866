//! Transition matrices and generators for credit-rating histories, with
//! rolling diagnostics for time homogeneity and the Markov property.
//!
//! The pipeline is:
//!
//! 1. [`ingest`] parses event CSVs into a [`Panel`] of per-bank step
//!    functions on the 15-notch [`scale`].
//! 2. [`stats`] gives cross-sectional histograms and moment series of
//!    ratings and rating increments.
//! 3. [`estimation`] counts transitions, integrates exposures, estimates a
//!    generator and maps it to a transition matrix through the matrix
//!    exponential; it also builds cohort transition matrices.
//! 4. [`diagnostics`] compares those matrices window by window.
//! 5. [`simulator`] produces synthetic panels with known ground truth.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod estimation;
pub mod expm;
pub mod format;
pub mod ingest;
pub mod model;
pub mod scale;
pub mod simulator;
pub mod stats;

pub use diagnostics::{
    ck_deviation, homogeneity_statistic, l2_norm, rolling_series, Statistic, TestPoint, TestSeries,
    WindowLength,
};
pub use error::{Error, Result};
pub use estimation::{
    count_transitions, empirical_transition_matrix, estimate_generator, exposures,
    matrix_exponential, CountMatrix, ExposureVector, GeneratorMatrix, TransitionMatrix,
};
pub use ingest::{daily_counts, parse_panel, transitions_per_bank, write_panel};
pub use model::{Increment, Panel, RatingEvent, RatingHistory, Window, DAYS_PER_YEAR, DEFAULT_TAU};
pub use scale::{RatingScale, RatingState, LABELS, N_STATES};
pub use simulator::{random_generator, simulate, Excitation, Scenario, ScenarioKind};
pub use stats::{increment_histogram, moment_series, moments, rating_histogram, Histogram, MomentSet, Sampling};
