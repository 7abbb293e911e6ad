//! Enumeration of the strictly separable dichotomies of a point set by affine
//! halfspaces `sign(v·x + b)`.

use std::collections::BTreeSet;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamming::Classifier;
use crate::lp::{min_margin, separate_exact, separate_float, verify_exact, LpMode, Separation};
use crate::points::{combinations, PointSet};

/// A witness `(v, b)` with margin at least one.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

impl Witness {
    /// Re-checks `y_i (v·x_i + b) >= 1` for every point.
    pub fn verify(&self, pts: &[&[f64]], labels: &[i8]) -> bool {
        match self {
            Witness::Exact(w) => verify_exact(pts, labels, &Separation::Separable(w.clone())),
            Witness::Float(w) => min_margin(pts, labels, w) >= 1.0 - 1e-9,
        }
    }

    pub fn approx(&self) -> Vec<f64> {
        match self {
            Witness::Exact(w) => w.iter().map(|x| num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN)).collect(),
            Witness::Float(w) => w.clone(),
        }
    }

    fn negated(&self) -> Self {
        match self {
            Witness::Exact(w) => Witness::Exact(w.iter().map(|x| -x).collect()),
            Witness::Float(w) => Witness::Float(w.iter().map(|x| -x).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dichotomy {
    pub labeling: Classifier,
    pub witness: Witness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnumerationStrategy {
    /// Every labeling tested by LP.
    AllLabelings,
    /// Candidates from hyperplanes through `d`-subsets, then LP-verified.
    HyperplanePivot,
}

#[derive(Debug, Clone)]
pub struct DichotomySet {
    pub dichotomies: Vec<Dichotomy>,
    pub strategy: EnumerationStrategy,
    pub lp_mode: LpMode,
    pub warnings: Vec<String>,
}

impl DichotomySet {
    pub fn len(&self) -> usize {
        self.dichotomies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dichotomies.is_empty()
    }

    pub fn labelings(&self) -> impl Iterator<Item = &Classifier> {
        self.dichotomies.iter().map(|d| &d.labeling)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct HalfspaceOptions {
    /// Largest `m` accepted.
    pub cap: usize,
    /// Exact rational LP up to this `m`, floating point above.
    pub exact_max_m: usize,
    /// All `2^m` labelings up to this `m`, pivot enumeration above.
    pub brute_force_max_m: usize,
}

impl Default for HalfspaceOptions {
    fn default() -> Self {
        HalfspaceOptions { cap: 20, exact_max_m: 16, brute_force_max_m: 16 }
    }
}

fn labels_of(mask: u64, m: usize) -> Vec<i8> {
    (0..m).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect()
}

fn solve(pts: &[&[f64]], labels: &[i8], mode: LpMode) -> Result<Option<Witness>> {
    Ok(match mode {
        LpMode::Exact => match separate_exact(pts, labels)? {
            Separation::Separable(w) => Some(Witness::Exact(w)),
            Separation::Inseparable(_) => None,
        },
        LpMode::Float => match separate_float(pts, labels)? {
            Separation::Separable(w) => Some(Witness::Float(w)),
            Separation::Inseparable(_) => None,
        },
    })
}

/// All labelings realizable with strict separation, sorted by bit mask.
pub fn enumerate_halfspace_dichotomies(pts: &PointSet) -> Result<DichotomySet> {
    enumerate_halfspace_dichotomies_with(pts, &HalfspaceOptions::default())
}

pub fn enumerate_halfspace_dichotomies_with(pts: &PointSet, opts: &HalfspaceOptions) -> Result<DichotomySet> {
    let m = pts.len();
    let cap = opts.cap.min(63);
    if m > cap {
        return Err(Error::CapExceeded { m, cap });
    }
    let mode = if m <= opts.exact_max_m { LpMode::Exact } else { LpMode::Float };
    let mut warnings = Vec::new();
    if !pts.general_position() {
        warnings.push("point set is not certified to be in general position; Cover-formula cross-checks do not apply".to_string());
    }
    let refs = pts.point_refs();

    let (strategy, masks): (EnumerationStrategy, Vec<u64>) = if m <= opts.brute_force_max_m {
        // Labelings come in ± pairs; only those with the last point negative are solved.
        (EnumerationStrategy::AllLabelings, (0..1u64 << (m - 1)).collect())
    } else {
        if !pts.general_position() {
            warnings.push("pivot enumeration is only complete for point sets in general position".to_string());
        }
        let cands = pivot_candidates(&refs, pts.dim());
        let half: Vec<u64> = cands.into_iter().filter(|mask| mask >> (m - 1) & 1 == 0).collect();
        (EnumerationStrategy::HyperplanePivot, half)
    };

    let solved: Vec<Option<(u64, Witness)>> = masks
        .par_iter()
        .map(|&mask| solve(&refs, &labels_of(mask, m), mode).map(|w| w.map(|w| (mask, w))))
        .collect::<Result<_>>()?;

    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let mut found: Vec<(u64, Witness)> = Vec::with_capacity(2 * solved.len());
    for (mask, w) in solved.into_iter().flatten() {
        found.push((full & !mask, w.negated()));
        found.push((mask, w));
    }
    found.sort_by_key(|(mask, _)| *mask);
    let dichotomies = found
        .into_iter()
        .map(|(mask, witness)| Dichotomy { labeling: Classifier::from_mask(pts.id(), m, mask), witness })
        .collect();
    Ok(DichotomySet { dichotomies, strategy, lp_mode: mode, warnings })
}

/// Normal `(v, b)` of an affine hyperplane through the given points, if they
/// determine one up to scale.
fn hyperplane_through(points: &[&[f64]], dim: usize) -> Option<Vec<f64>> {
    let cols = dim + 1;
    let mut rows: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            let mut r = p.to_vec();
            r.push(1.0);
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let piv = (r..rows.len()).max_by(|&a, &b| rows[a][c].abs().total_cmp(&rows[b][c].abs()))?;
        if rows[piv][c].abs() < 1e-12 {
            continue;
        }
        rows.swap(r, piv);
        let p = rows[r][c];
        rows[r].iter_mut().for_each(|v| *v /= p);
        let prow = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0.0 {
                let f = row[c];
                row.iter_mut().zip(&prow).for_each(|(v, pv)| *v -= f * pv);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    let mut w = vec![0.0; cols];
    w[free] = 1.0;
    for (row, &pc) in pivots.iter().enumerate() {
        w[pc] = -rows[row][free];
    }
    Some(w)
}

/// Candidate labelings: for every hyperplane through `d` of the points, the
/// sides of the remaining points (both orientations) combined with every
/// sign pattern on the points lying on the hyperplane. In general position
/// every separable labeling arises this way.
fn pivot_candidates(pts: &[&[f64]], dim: usize) -> BTreeSet<u64> {
    let m = pts.len();
    let k = dim.min(m);
    let full = (1u64 << m) - 1;
    let subsets: Vec<Vec<usize>> = combinations(m, k).collect();
    let per_subset: Vec<Vec<u64>> = subsets
        .par_iter()
        .map(|idx| {
            let chosen: Vec<&[f64]> = idx.iter().map(|&i| pts[i]).collect();
            let Some(w) = hyperplane_through(&chosen, dim) else { return Vec::new() };
            let scale = w.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            let mut on = Vec::new();
            let mut positive = 0u64;
            for (i, p) in pts.iter().enumerate() {
                let s: f64 = p.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + w[dim];
                let mag = p.iter().fold(1.0f64, |a, b| a.max(b.abs()));
                if idx.contains(&i) || s.abs() <= 1e-9 * scale * mag {
                    on.push(i);
                } else if s > 0.0 {
                    positive |= 1 << i;
                }
            }
            let on_mask: u64 = on.iter().map(|&i| 1u64 << i).sum();
            let negative = full & !positive & !on_mask;
            let mut out = Vec::with_capacity(1 << (on.len() + 1));
            for pattern in 0..1u64 << on.len() {
                let mut extra = 0u64;
                for (bit, &i) in on.iter().enumerate() {
                    if pattern >> bit & 1 == 1 {
                        extra |= 1 << i;
                    }
                }
                out.push(positive | extra);
                out.push(negative | extra);
            }
            out
        })
        .collect();
    let mut set: BTreeSet<u64> = per_subset.into_iter().flatten().collect();
    set.insert(0);
    set.insert(full);
    set
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(points: Vec<Vec<f64>>) -> PointSet {
        PointSet::from_points(points).unwrap()
    }

    #[test]
    fn triangle_has_all_eight() {
        let pts = set(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]);
        let ds = enumerate_halfspace_dichotomies(&pts).unwrap();
        assert_eq!(ds.len(), 8);
        assert!(ds.warnings.is_empty());
    }

    #[test]
    fn square_excludes_xor() {
        let pts = set(vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]);
        let ds = enumerate_halfspace_dichotomies(&pts).unwrap();
        assert_eq!(ds.len(), 14);
        let masks: Vec<u64> = ds.labelings().map(|c| c.mask().unwrap()).collect();
        assert!(!masks.contains(&0b0110));
        assert!(!masks.contains(&0b1001));
        let refs = pts.point_refs();
        for d in &ds.dichotomies {
            assert!(d.witness.verify(&refs, &d.labeling.labels()));
        }
    }

    #[test]
    fn single_point() {
        let ds = enumerate_halfspace_dichotomies(&set(vec![vec![3.0, 4.0]])).unwrap();
        assert_eq!(ds.len(), 2);
    }

    #[test]
    fn collinear_points_warned() {
        let pts = set(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]);
        let ds = enumerate_halfspace_dichotomies(&pts).unwrap();
        assert_eq!(ds.len(), 6);
        assert!(!ds.warnings.is_empty());
    }

    #[test]
    fn cap_enforced() {
        let pts = PointSet::random_normal(21, 2, 1, 10).unwrap();
        assert!(matches!(enumerate_halfspace_dichotomies(&pts), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn pivot_matches_brute_force() {
        for seed in 0..3 {
            let pts = PointSet::random_normal(9, 2, seed, 100).unwrap();
            let brute = enumerate_halfspace_dichotomies(&pts).unwrap();
            let opts = HalfspaceOptions { cap: 20, exact_max_m: 16, brute_force_max_m: 4 };
            let pivot = enumerate_halfspace_dichotomies_with(&pts, &opts).unwrap();
            assert_eq!(pivot.strategy, EnumerationStrategy::HyperplanePivot);
            let a: Vec<_> = brute.labelings().cloned().collect();
            let b: Vec<_> = pivot.labelings().cloned().collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn float_mode_matches_exact() {
        let pts = PointSet::random_normal(8, 3, 4, 100).unwrap();
        let exact = enumerate_halfspace_dichotomies(&pts).unwrap();
        let opts = HalfspaceOptions { cap: 20, exact_max_m: 0, brute_force_max_m: 16 };
        let float = enumerate_halfspace_dichotomies_with(&pts, &opts).unwrap();
        assert_eq!(float.lp_mode, LpMode::Float);
        let a: Vec<_> = exact.labelings().cloned().collect();
        let b: Vec<_> = float.labelings().cloned().collect();
        assert_eq!(a, b);
    }
}
