//! Concentration bounds and the Monte Carlo experiments that confront them.

pub mod bd;
pub mod bounds;
pub mod experiments;
pub mod report;

pub use bd::{
    bd_flip_check_empirical, bd_flip_check_empirical_exhaustive, bd_flip_check_eta, bd_flip_check_eta_exhaustive,
    BdFunctional, BdReport,
};
pub use bounds::{
    bd_parameters_empirical, bd_parameters_eta, corollary_rates, mcdiarmid_bound, thm2_bounds, thm2_bounds_ln,
    thm3_bound, thm3_bound_ln, BdParameters, BoundKind, BoundSpec, CorollaryMode, Thm2Bounds, Thm3Bounds, Thm3Variant,
};
pub use experiments::{
    approx_concentration_experiment, approx_trial, uniform_convergence_experiment, uniform_trial, ApproxTrial,
};
pub use report::{
    binomial_sigma, fnum, is_violation, ConcentrationReport, DeviationSummary, DistanceSummary, ExperimentKind,
    ReportParameters,
};
