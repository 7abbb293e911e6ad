//! Concrete hypothesis families and their growth functions.

pub mod counting;
pub mod growth;
pub mod halfspace;
pub mod relu;
pub mod vc;

use num_bigint::BigUint;
use serde::Serializer;

use crate::error::{Error, Result};
use crate::hamming::Classifier;

pub use counting::{bartlett_bound, binomial, cover_count, sauer_shelah_bound, vc_polynomial_bound, Bartlett, SauerShelah};
pub use growth::{growth_record, GrowthBounds, GrowthMethod, GrowthOptions, GrowthRecord};
pub use halfspace::{
    enumerate_halfspace_dichotomies, enumerate_halfspace_dichotomies_with, Dichotomy, DichotomySet,
    EnumerationStrategy, HalfspaceOptions, Witness,
};
pub use relu::{relu_forward, relu_labeling, sample_relu_labelings, xor_network, DenseLayer, ReluArch, ReluParams};
pub use vc::{vc_dimension_search, VcOptions};

#[derive(Debug, Clone, PartialEq)]
pub enum HypothesisClass {
    /// A finite list of classifiers on one domain.
    ExplicitList(Vec<Classifier>),
    /// `sign(v·x + b)` on `R^d`.
    AffineHalfspace { dim: usize },
    ReluNetwork(ReluArch),
}

impl HypothesisClass {
    pub fn explicit(list: Vec<Classifier>) -> Result<Self> {
        if list.is_empty() {
            return Err(Error::EmptyClass);
        }
        let first = (list[0].domain(), list[0].len());
        if list.iter().any(|c| (c.domain(), c.len()) != first) {
            return Err(Error::DomainMismatch);
        }
        Ok(HypothesisClass::ExplicitList(list))
    }

    pub fn name(&self) -> &'static str {
        match self {
            HypothesisClass::ExplicitList(_) => "explicit-list",
            HypothesisClass::AffineHalfspace { .. } => "affine-halfspace",
            HypothesisClass::ReluNetwork(_) => "relu-network",
        }
    }
}

pub(crate) fn ser_big<S: Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub(crate) fn ser_big_opt<S: Serializer>(x: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}
