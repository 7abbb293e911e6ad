//! Point sets in `R^d` with a general-position certificate.

use std::io::Read;
use std::path::Path;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamming::{Domain, DomainId};
use crate::seed::{derive_seed, rng_from};

/// Largest point set for which general position is checked at construction.
pub const GENERAL_POSITION_CHECK_MAX: usize = 20;
pub const RANK_TOL: f64 = 1e-9;

/// Iterates over all `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut state: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let current = state.take()?;
        let mut next = current.clone();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if next[i] < n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                state = Some(next);
                break;
            }
        }
        Some(current)
    })
}

/// Rank of a row-major matrix by Gaussian elimination with partial pivoting.
/// Pivots below `tol` times the largest entry magnitude count as zero.
pub fn numeric_rank(mut rows: Vec<Vec<f64>>, tol: f64) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let scale = rows
        .iter()
        .flatten()
        .fold(0.0f64, |a, &b| a.max(b.abs()))
        .max(f64::MIN_POSITIVE);
    let mut rank = 0;
    for col in 0..ncols {
        if rank == rows.len() {
            break;
        }
        let (piv, val) = (rank..rows.len())
            .map(|r| (r, rows[r][col].abs()))
            .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol * scale {
            continue;
        }
        rows.swap(rank, piv);
        let prow = rows[rank].clone();
        for r in rank + 1..rows.len() {
            let f = rows[r][col] / prow[col];
            if f != 0.0 {
                for c in col..ncols {
                    rows[r][c] -= f * prow[c];
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Whether the given points are affinely independent.
pub fn affinely_independent(points: &[&[f64]], tol: f64) -> bool {
    if points.len() <= 1 {
        return true;
    }
    let base = points[0];
    let diffs: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    numeric_rank(diffs, tol) == points.len() - 1
}

/// A domain used as input to geometric hypothesis classes.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    domain: Domain,
    general_position: bool,
    /// Whether `general_position` was established by the rank test.
    checked: bool,
}

impl PointSet {
    /// Wraps a domain, certifying general position when `m <= 20`.
    pub fn new(domain: Domain) -> Self {
        let m = domain.len();
        if m > GENERAL_POSITION_CHECK_MAX {
            return PointSet { domain, general_position: false, checked: false };
        }
        let general_position = in_general_position(&domain);
        PointSet { domain, general_position, checked: true }
    }

    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self> {
        Ok(Self::new(Domain::new(points)?))
    }

    /// Marks a large set as being in general position without checking.
    pub fn assume_general_position(mut self) -> Self {
        if !self.checked {
            self.general_position = true;
        }
        self
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn id(&self) -> DomainId {
        self.domain.id()
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn general_position(&self) -> bool {
        self.general_position
    }

    pub fn general_position_checked(&self) -> bool {
        self.checked
    }

    pub fn point_refs(&self) -> Vec<&[f64]> {
        self.domain.points().iter().map(Vec::as_slice).collect()
    }

    pub fn subset(&self, indices: &[usize]) -> Result<PointSet> {
        Ok(PointSet::new(self.domain.subset(indices)?))
    }

    /// Reads one point per CSV row; no header.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
        let mut points = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let row = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| Error::Parse(format!("row {i}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            points.push(row);
        }
        Self::from_points(points)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(f)
    }

    /// Reads `{"points": [[...], ...]}`.
    pub fn from_json_str(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Repr {
            points: Vec<Vec<f64>>,
        }
        let r: Repr = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_points(r.points)
    }

    /// Standard normal cloud, resampling each failed general-position check.
    pub fn random_normal(m: usize, d: usize, seed: u64, max_retries: usize) -> Result<Self> {
        if m == 0 || d == 0 {
            return Err(Error::Precondition("random point sets need m >= 1 and d >= 1".into()));
        }
        for attempt in 0..=max_retries {
            let mut rng = rng_from(derive_seed(seed, attempt as u64));
            let points: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..d).map(|_| StandardNormal.sample(&mut rng)).collect())
                .collect();
            let Ok(set) = Self::from_points(points) else { continue };
            let set = set.assume_general_position();
            if set.general_position {
                return Ok(set);
            }
        }
        Err(Error::Precondition(format!(
            "no general-position sample after {max_retries} retries"
        )))
    }
}

/// Every subset of at most `d + 1` points is affinely independent.
pub fn in_general_position(domain: &Domain) -> bool {
    let k = (domain.dim() + 1).min(domain.len());
    let pts = domain.points();
    combinations(pts.len(), k).all(|idx| {
        let sub: Vec<&[f64]> = idx.iter().map(|&i| pts[i].as_slice()).collect();
        affinely_independent(&sub, RANK_TOL)
    })
}

#[derive(Serialize)]
struct PointsJson<'a> {
    points: &'a [Vec<f64>],
}

impl Serialize for PointSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PointsJson { points: self.domain.points() }.serialize(s)
    }
}
