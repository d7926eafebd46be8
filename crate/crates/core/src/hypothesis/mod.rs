//! Finite domains, hypothesis classes, data models and the disagreement
//! geometry built on them.

mod class;
mod geometry;
mod model;
mod sampling;
mod version_space;

pub use class::{signature_string, HypothesisClass};
pub use geometry::{
    conditional_true_error, disagreement_coefficient, disagreement_mass, disagreement_region,
    error_ball, hypothesis_distance, noise_rate, true_error, PROB_TOLERANCE,
};
pub use model::{DataModel, LabelMechanism};
pub use sampling::{
    conditional_empirical_error, sample_labeled, sample_labeled_counts, sample_labeled_counts_full, sample_region_hits,
    sample_unlabeled, Counters, DataRng, LabelCounts, LabeledSample,
};
pub use version_space::VersionSpace;
