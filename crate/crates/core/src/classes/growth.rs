//! Growth records: the number of labelings a class induces on one point
//! configuration, with every applicable analytic bound attached.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::classes::counting::{bartlett_bound, cover_count, sauer_shelah_bound, vc_polynomial_bound};
use crate::classes::halfspace::{enumerate_halfspace_dichotomies_with, HalfspaceOptions};
use crate::classes::relu::sample_relu_labelings;
use crate::classes::vc::{vc_dimension_search, VcOptions, K_MAX_LIMIT};
use crate::classes::HypothesisClass;
use crate::error::{Error, Result};
use crate::points::PointSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthMethod {
    ExactEnumeration,
    CoverFormula,
    ParameterSampling,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct GrowthBounds {
    /// `m^(d_V + 1)`.
    #[serde(serialize_with = "crate::classes::ser_big_opt")]
    pub vc_poly: Option<BigUint>,
    /// `Σ_{i <= d_V} binom(m, i)`.
    #[serde(serialize_with = "crate::classes::ser_big_opt")]
    pub sauer_shelah_sum: Option<BigUint>,
    /// `(e m / d_V)^d_V`.
    pub sauer_shelah_env: Option<f64>,
    /// `L W ln(4 e L m)`.
    pub bartlett_log: Option<f64>,
}

impl GrowthBounds {
    /// Attaches every bound whose preconditions hold.
    pub fn for_class(m: u64, d_v: Option<u64>, relu: Option<(u64, u64)>) -> Self {
        let mut b = GrowthBounds::default();
        if let Some(d) = d_v {
            b.vc_poly = vc_polynomial_bound(m, d).ok();
            if let Ok(s) = sauer_shelah_bound(m, d) {
                b.sauer_shelah_sum = Some(s.sum);
                b.sauer_shelah_env = Some(s.envelope);
            }
        }
        if let Some((depth, params)) = relu {
            b.bartlett_log = bartlett_bound(m, depth, params).ok().map(|x| x.log);
        }
        b
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRecord {
    pub class: String,
    pub m: usize,
    /// Exact number of induced labelings on this configuration.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
    /// Certified lower bound when labelings were found by sampling.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<u64>,
    pub method: GrowthMethod,
    /// VC dimension used for the polynomial bounds.
    pub d_v: Option<u64>,
    /// Count equals the maximum over all `m`-point configurations.
    pub growth_function_exact: bool,
    /// `C(m, d + 1)` for affine halfspaces.
    #[serde(serialize_with = "crate::classes::ser_big_opt")]
    pub cover_count: Option<BigUint>,
    pub bounds: GrowthBounds,
    pub warnings: Vec<String>,
}

impl GrowthRecord {
    /// The exact count or the sampled lower bound.
    pub fn value(&self) -> u64 {
        self.count.or(self.lower_bound).unwrap_or(0)
    }

    /// `count <= 2^m` and `count <=` every attached integer bound.
    pub fn is_consistent(&self) -> bool {
        let v = BigUint::from(self.value());
        let cube = BigUint::from(2u32).pow(self.m as u32);
        if v > cube {
            return false;
        }
        let Some(c) = self.count else { return true };
        let c_big = BigUint::from(c);
        let ok_poly = self.bounds.vc_poly.as_ref().is_none_or(|b| &c_big <= b);
        let ok_sum = self.bounds.sauer_shelah_sum.as_ref().is_none_or(|b| &c_big <= b);
        let ok_env = self.bounds.sauer_shelah_env.is_none_or(|b| (c as f64) <= b);
        let ok_bart = self.bounds.bartlett_log.is_none_or(|b| (c as f64).ln() <= b);
        ok_poly && ok_sum && ok_env && ok_bart
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthOptions {
    pub halfspace: HalfspaceOptions,
    pub relu_samples: usize,
    pub relu_range: f64,
    pub seed: u64,
    /// Overrides the VC dimension used for the bounds.
    pub d_v: Option<u64>,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions {
            halfspace: HalfspaceOptions::default(),
            relu_samples: 10_000,
            relu_range: 1.0,
            seed: 0,
            d_v: None,
        }
    }
}

/// Counts the labelings `class` induces on `pts` and attaches the bounds.
///
/// One configuration only gives a lower bound on the growth function (a
/// maximum over configurations); `growth_function_exact` is set when the
/// Cover formula certifies the count is that maximum.
pub fn growth_record(class: &HypothesisClass, pts: &PointSet, opts: &GrowthOptions) -> Result<GrowthRecord> {
    let m = pts.len();
    match class {
        HypothesisClass::AffineHalfspace { dim } => {
            if *dim != pts.dim() {
                return Err(Error::Shape(format!("points have dimension {}, class expects {dim}", pts.dim())));
            }
            let ds = enumerate_halfspace_dichotomies_with(pts, &opts.halfspace)?;
            let count = ds.len() as u64;
            let cover = cover_count(m as u64, *dim as u64 + 1)?;
            let exact = pts.general_position() && cover.to_u64() == Some(count);
            let d_v = opts.d_v.unwrap_or(*dim as u64 + 1);
            let mut warnings = ds.warnings;
            if !exact {
                warnings.push("count is a lower bound on the growth function for this m".into());
            }
            Ok(GrowthRecord {
                class: class.name().into(),
                m,
                count: Some(count),
                lower_bound: None,
                method: if exact { GrowthMethod::CoverFormula } else { GrowthMethod::ExactEnumeration },
                d_v: Some(d_v),
                growth_function_exact: exact,
                cover_count: Some(cover),
                bounds: GrowthBounds::for_class(m as u64, Some(d_v), None),
                warnings,
            })
        }
        HypothesisClass::ExplicitList(list) => {
            if list.first().is_some_and(|h| h.len() != m) {
                return Err(Error::LengthMismatch { expected: m, got: list[0].len() });
            }
            let distinct: BTreeSet<_> = list.iter().collect();
            let d_v = match opts.d_v {
                Some(d) => d,
                None => vc_dimension_search(class, pts, m.min(K_MAX_LIMIT), &VcOptions::default())? as u64,
            };
            Ok(GrowthRecord {
                class: class.name().into(),
                m,
                count: Some(distinct.len() as u64),
                lower_bound: None,
                method: GrowthMethod::ExactEnumeration,
                d_v: Some(d_v),
                // The class lives on this one domain, so its trace here is all there is.
                growth_function_exact: true,
                cover_count: None,
                bounds: GrowthBounds::for_class(m as u64, Some(d_v), None),
                warnings: Vec::new(),
            })
        }
        HypothesisClass::ReluNetwork(arch) => {
            let found = sample_relu_labelings(arch, pts, opts.relu_samples, opts.seed, opts.relu_range)?;
            Ok(GrowthRecord {
                class: class.name().into(),
                m,
                count: None,
                lower_bound: Some(found.len() as u64),
                method: GrowthMethod::ParameterSampling,
                d_v: opts.d_v,
                growth_function_exact: false,
                cover_count: None,
                bounds: GrowthBounds::for_class(
                    m as u64,
                    opts.d_v,
                    Some((arch.depth() as u64, arch.param_count() as u64)),
                ),
                warnings: vec!["sampled labelings give a lower bound on the growth function".into()],
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::relu::ReluArch;
    use crate::hamming::Classifier;

    fn square() -> PointSet {
        PointSet::from_points(vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap()
    }

    #[test]
    fn convex_square_record() {
        let r = growth_record(&HypothesisClass::AffineHalfspace { dim: 2 }, &square(), &GrowthOptions::default()).unwrap();
        assert_eq!(r.count, Some(14));
        assert_eq!(r.d_v, Some(3));
        assert_eq!(r.bounds.sauer_shelah_sum, Some(BigUint::from(15u32)));
        assert_eq!(r.bounds.vc_poly, Some(BigUint::from(256u32)));
        assert!(r.growth_function_exact);
        assert_eq!(r.method, GrowthMethod::CoverFormula);
        assert!(r.is_consistent());
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["count"], 14);
        assert!(json.get("lower_bound").is_none());
        assert_eq!(json["bounds"]["sauer_shelah_sum"], "15");
    }

    #[test]
    fn explicit_list_record() {
        let pts = square();
        let list: Vec<Classifier> = ["++--", "+-+-", "++--"].iter().map(|s| Classifier::parse(pts.id(), s).unwrap()).collect();
        let r = growth_record(&HypothesisClass::explicit(list.clone()).unwrap(), &pts, &GrowthOptions::default()).unwrap();
        assert!(r.count.unwrap() <= list.len() as u64);
        assert_eq!(r.count, Some(2));
        assert_eq!(r.d_v, Some(1));
        assert!(r.is_consistent());
    }

    #[test]
    fn relu_record_is_lower_bound() {
        let arch = ReluArch::new(2, vec![2]).unwrap();
        let r = growth_record(&HypothesisClass::ReluNetwork(arch), &square(), &GrowthOptions::default()).unwrap();
        assert_eq!(r.method, GrowthMethod::ParameterSampling);
        assert!(r.count.is_none());
        assert!(r.lower_bound.unwrap() >= 1);
        assert!(r.bounds.bartlett_log.is_some());
        let json = serde_json::to_value(&r).unwrap();
        assert!(json.get("count").is_none());
        assert!(json["lower_bound"].is_u64());
        assert!(r.is_consistent());
    }
}
