//! Classifiers on finite domains as vertices of the Hamming cube, growth
//! functions of concrete hypothesis classes, and Monte Carlo confrontation
//! of McDiarmid-type concentration bounds for approximation and empirical
//! errors.

pub mod classes;
pub mod concentration;
pub mod error;
pub mod hamming;
pub mod learning;
pub mod lp;
pub mod points;
pub mod seed;

pub use error::{Error, Result};
pub use hamming::{
    distance_sq_to_class, eta, mean_eta, mu_class, normalized_inner, sample_classifier, Classifier, Domain, DomainId,
    Eta, NormalizedInner, ProductDistribution,
};
pub use learning::{empirical_error, sample_dataset, true_error, LabelLaw, LossFunction, SampleSet, SamplingDistribution};
pub use points::PointSet;
