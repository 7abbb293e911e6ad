//! Shattering search over subsets of a point pool.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::classes::relu::{relu_labeling, sample_relu_labelings, ReluArch, ReluParams};
use crate::classes::HypothesisClass;
use crate::error::{Error, Result};
use crate::lp::{separate_exact, Separation};
use crate::points::{combinations, PointSet};
use crate::seed::derive_seed;

pub const K_MAX_LIMIT: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VcOptions {
    /// Parameter draws per candidate subset for ReLU classes.
    pub relu_samples: usize,
    pub relu_range: f64,
    pub seed: u64,
}

impl Default for VcOptions {
    fn default() -> Self {
        VcOptions { relu_samples: 20_000, relu_range: 1.0, seed: 0 }
    }
}

/// Largest `k <= k_max` such that some `k`-subset of the pool is shattered.
///
/// Subsets of a shattered set are shattered, so the search stops at the
/// first size with no shattered subset. For ReLU classes the answer is a
/// lower bound (realizability is certified by explicit parameters only).
pub fn vc_dimension_search(class: &HypothesisClass, pool: &PointSet, k_max: usize, opts: &VcOptions) -> Result<usize> {
    if k_max > K_MAX_LIMIT {
        return Err(Error::Precondition(format!("k_max = {k_max} exceeds {K_MAX_LIMIT}")));
    }
    match class {
        HypothesisClass::AffineHalfspace { dim } if *dim != pool.dim() => {
            return Err(Error::Shape(format!("pool has dimension {}, class expects {dim}", pool.dim())))
        }
        HypothesisClass::ReluNetwork(arch) if arch.input_dim != pool.dim() => {
            return Err(Error::Shape(format!("pool has dimension {}, network expects {}", pool.dim(), arch.input_dim)))
        }
        HypothesisClass::ExplicitList(list) => {
            if let Some(h) = list.first() {
                if h.len() != pool.len() {
                    return Err(Error::LengthMismatch { expected: pool.len(), got: h.len() });
                }
            }
        }
        _ => {}
    }
    let mut best = 0;
    for k in 1..=k_max.min(pool.len()) {
        let subsets: Vec<Vec<usize>> = combinations(pool.len(), k).collect();
        let hits: Vec<bool> = subsets
            .par_iter()
            .enumerate()
            .map(|(rank, idx)| shattered(class, pool, idx, derive_seed(opts.seed, (k as u64) << 32 | rank as u64), opts))
            .collect::<Result<_>>()?;
        if hits.into_iter().any(|h| h) {
            best = k;
        } else {
            break;
        }
    }
    Ok(best)
}

fn shattered(class: &HypothesisClass, pool: &PointSet, idx: &[usize], seed: u64, opts: &VcOptions) -> Result<bool> {
    let k = idx.len();
    let total = 1usize << k;
    match class {
        HypothesisClass::ExplicitList(list) => {
            let masks: HashSet<u64> = list
                .iter()
                .map(|h| idx.iter().enumerate().filter(|(_, &i)| h.get(i) > 0).map(|(b, _)| 1u64 << b).sum())
                .collect();
            Ok(masks.len() == total)
        }
        HypothesisClass::AffineHalfspace { .. } => {
            let pts: Vec<&[f64]> = idx.iter().map(|&i| pool.domain().point(i)).collect();
            for mask in 0..total as u64 / 2 {
                let labels = mask_labels(mask, k);
                if !separate_exact(&pts, &labels)?.is_separable() {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        HypothesisClass::ReluNetwork(arch) => relu_shatters(arch, pool, idx, seed, opts),
    }
}

fn mask_labels(mask: u64, k: usize) -> Vec<i8> {
    (0..k).map(|b| if mask >> b & 1 == 1 { 1 } else { -1 }).collect()
}

/// Every labeling must be realized by concrete parameters: halfspace
/// embeddings from an LP witness first, then random draws.
fn relu_shatters(arch: &ReluArch, pool: &PointSet, idx: &[usize], seed: u64, opts: &VcOptions) -> Result<bool> {
    let k = idx.len();
    let sub = pool.subset(idx)?;
    let pts = sub.point_refs();
    let mut realized: HashSet<u64> = HashSet::new();
    for mask in 0..1u64 << k {
        let labels = mask_labels(mask, k);
        if let Separation::Separable(w) = separate_exact(&pts, &labels)? {
            let w: Vec<f64> = w.iter().map(|x| num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN)).collect();
            let params = ReluParams::halfspace(arch, &w[..arch.input_dim], w[arch.input_dim])?;
            let got = relu_labeling(&params, &sub)?;
            if got.labels() == labels {
                realized.insert(mask);
            }
        }
    }
    if realized.len() == 1 << k {
        return Ok(true);
    }
    for f in sample_relu_labelings(arch, &sub, opts.relu_samples, seed, opts.relu_range)? {
        realized.insert(f.mask().expect("k <= 25"));
    }
    Ok(realized.len() == 1 << k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamming::Classifier;

    #[test]
    fn halfspaces_on_a_line() {
        let pool = PointSet::from_points(vec![vec![0.3], vec![-1.0], vec![2.5], vec![4.0], vec![1.1]]).unwrap();
        let class = HypothesisClass::AffineHalfspace { dim: 1 };
        assert_eq!(vc_dimension_search(&class, &pool, 5, &VcOptions::default()).unwrap(), 2);
    }

    #[test]
    fn halfspaces_in_the_plane() {
        let pool = PointSet::random_normal(8, 2, 11, 100).unwrap();
        let class = HypothesisClass::AffineHalfspace { dim: 2 };
        assert_eq!(vc_dimension_search(&class, &pool, 6, &VcOptions::default()).unwrap(), 3);
    }

    #[test]
    fn singleton_list_shatters_nothing() {
        let pool = PointSet::from_points(vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let h = Classifier::parse(pool.id(), "+-+").unwrap();
        let class = HypothesisClass::explicit(vec![h]).unwrap();
        assert_eq!(vc_dimension_search(&class, &pool, 3, &VcOptions::default()).unwrap(), 0);
    }

    #[test]
    fn full_cube_list_shatters_everything() {
        let pool = PointSet::from_points(vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let list = (0..8).map(|mask| Classifier::from_mask(pool.id(), 3, mask)).collect();
        let class = HypothesisClass::explicit(list).unwrap();
        assert_eq!(vc_dimension_search(&class, &pool, 3, &VcOptions::default()).unwrap(), 3);
    }

    #[test]
    fn k_max_limit() {
        let pool = PointSet::from_points(vec![vec![0.0]]).unwrap();
        let class = HypothesisClass::AffineHalfspace { dim: 1 };
        assert!(vc_dimension_search(&class, &pool, 26, &VcOptions::default()).is_err());
    }

    #[test]
    fn relu_realizes_xor_set() {
        let pool = PointSet::from_points(vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let arch = ReluArch::new(2, vec![2]).unwrap();
        let class = HypothesisClass::ReluNetwork(arch);
        let opts = VcOptions { relu_samples: 100_000, ..VcOptions::default() };
        assert_eq!(vc_dimension_search(&class, &pool, 4, &opts).unwrap(), 4);
    }
}
