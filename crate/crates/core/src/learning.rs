//! Labeled samples drawn from `P_X(x) P_0(y | x)` and the empirical and true
//! error functionals of a classifier.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamming::{Classifier, DomainId};
use crate::seed::rng_from;

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Conditional law of the label given the point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelLaw {
    /// `P_0(y = +1 | x) = p0` for every point.
    Iid(f64),
    /// One probability per point.
    PerPoint(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingDistribution {
    domain: DomainId,
    x_weights: Vec<f64>,
    labels: LabelLaw,
}

impl SamplingDistribution {
    pub fn new(domain: DomainId, x_weights: Vec<f64>, labels: LabelLaw) -> Result<Self> {
        if x_weights.is_empty() {
            return Err(Error::InvalidDistribution("P_X has no support points".into()));
        }
        if let Some((i, &w)) = x_weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidProbability { index: i, value: w });
        }
        let total: f64 = x_weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidDistribution(format!("P_X weights sum to {total}, not 1")));
        }
        match &labels {
            LabelLaw::Iid(p) => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::InvalidProbability { index: 0, value: *p });
                }
            }
            LabelLaw::PerPoint(ps) => {
                if ps.len() != x_weights.len() {
                    return Err(Error::LengthMismatch { expected: x_weights.len(), got: ps.len() });
                }
                if let Some((i, &p)) = ps.iter().enumerate().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
                    return Err(Error::InvalidProbability { index: i, value: p });
                }
            }
        }
        Ok(SamplingDistribution { domain, x_weights, labels })
    }

    /// Uniform `P_X` with a single label probability.
    pub fn uniform(domain: DomainId, m: usize, p0: f64) -> Result<Self> {
        Self::new(domain, vec![1.0 / m as f64; m], LabelLaw::Iid(p0))
    }

    pub fn domain(&self) -> DomainId {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.x_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_weights.is_empty()
    }

    pub fn x_weights(&self) -> &[f64] {
        &self.x_weights
    }

    pub fn label_law(&self) -> &LabelLaw {
        &self.labels
    }

    /// `P_0(y = +1 | x_i)`.
    pub fn label_prob(&self, i: usize) -> f64 {
        match &self.labels {
            LabelLaw::Iid(p) => *p,
            LabelLaw::PerPoint(ps) => ps[i],
        }
    }
}

/// Loss table `l(y, ŷ)` on `{-1,1}²` with values in `[0, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossFunction {
    /// Indexed `[y][ŷ]` with `0 ↔ -1`, `1 ↔ +1`.
    table: [[f64; 2]; 2],
    bound_b: f64,
}

#[inline]
fn slot(y: i8) -> usize {
    (y > 0) as usize
}

impl LossFunction {
    pub fn new(table: [[f64; 2]; 2]) -> Result<Self> {
        let flat = table.iter().flatten().copied();
        if flat.clone().any(|v| !v.is_finite() || v < 0.0) {
            return Err(Error::InvalidLoss("entries must be finite and nonnegative".into()));
        }
        let bound_b = flat.fold(0.0, f64::max);
        if bound_b <= 0.0 {
            return Err(Error::InvalidLoss("loss is identically zero".into()));
        }
        Ok(LossFunction { table, bound_b })
    }

    pub fn zero_one() -> Self {
        Self::new([[0.0, 1.0], [1.0, 0.0]]).expect("valid table")
    }

    #[inline]
    pub fn eval(&self, y: i8, y_hat: i8) -> f64 {
        self.table[slot(y)][slot(y_hat)]
    }

    pub fn bound(&self) -> f64 {
        self.bound_b
    }

    pub fn table(&self) -> [[f64; 2]; 2] {
        self.table
    }
}

/// `n` labeled draws `(point index, label)`; repeated indices allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSet {
    domain: DomainId,
    m: usize,
    pairs: Vec<(usize, i8)>,
}

impl SampleSet {
    pub fn new(domain: DomainId, m: usize, pairs: Vec<(usize, i8)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Precondition("sample size must be at least 1".into()));
        }
        for &(i, y) in &pairs {
            if i >= m {
                return Err(Error::InvalidIndex { index: i, m });
            }
            if y != 1 && y != -1 {
                return Err(Error::InvalidClassifier(format!("sample label {y} is not +-1")));
            }
        }
        Ok(SampleSet { domain, m, pairs })
    }

    pub fn pairs(&self) -> &[(usize, i8)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn domain(&self) -> DomainId {
        self.domain
    }

    /// Copy with pair `j` replaced.
    pub fn replaced(&self, j: usize, pair: (usize, i8)) -> Result<Self> {
        let mut pairs = self.pairs.clone();
        pairs[j] = pair;
        Self::new(self.domain, self.m, pairs)
    }

    /// Per-point counts of `-1` and `+1` labels.
    pub fn tally(&self) -> Vec<[u32; 2]> {
        let mut counts = vec![[0u32; 2]; self.m];
        for &(i, y) in &self.pairs {
            counts[i][slot(y)] += 1;
        }
        counts
    }
}

fn check_domain(h: &Classifier, domain: DomainId, m: usize) -> Result<()> {
    if h.domain() != domain {
        return Err(Error::DomainMismatch);
    }
    if h.len() != m {
        return Err(Error::LengthMismatch { expected: m, got: h.len() });
    }
    Ok(())
}

/// Average table loss of `h` over the sample.
pub fn empirical_error(sample: &SampleSet, h: &Classifier, loss: &LossFunction) -> Result<f64> {
    check_domain(h, sample.domain, sample.m)?;
    let total: f64 = sample.pairs.iter().map(|&(i, y)| loss.eval(y, h.get(i))).sum();
    Ok(total / sample.len() as f64)
}

/// Empirical error from a tally; same value as [`empirical_error`] up to summation order.
pub(crate) fn empirical_error_tally(counts: &[[u32; 2]], n: usize, h: &Classifier, loss: &LossFunction) -> f64 {
    let mut total = 0.0;
    for (i, c) in counts.iter().enumerate() {
        let yh = h.get(i);
        total += c[0] as f64 * loss.eval(-1, yh) + c[1] as f64 * loss.eval(1, yh);
    }
    total / n as f64
}

/// Expected loss `Σ_x P_X(x) Σ_y P_0(y|x) l(y, h(x))`.
pub fn true_error(h: &Classifier, dist: &SamplingDistribution, loss: &LossFunction) -> Result<f64> {
    check_domain(h, dist.domain, dist.len())?;
    Ok(dist
        .x_weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let p = dist.label_prob(i);
            let yh = h.get(i);
            w * (p * loss.eval(1, yh) + (1.0 - p) * loss.eval(-1, yh))
        })
        .sum())
}

/// Draws `n` i.i.d. pairs: point from `P_X`, then label from `P_0(· | x)`.
pub fn sample_dataset(dist: &SamplingDistribution, n: usize, seed: u64) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::Precondition("sample size must be at least 1".into()));
    }
    let index = WeightedIndex::new(&dist.x_weights)
        .map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    let mut rng = rng_from(seed);
    let pairs = (0..n)
        .map(|_| {
            let i = index.sample(&mut rng);
            let u: f64 = rng.random();
            (i, if u < dist.label_prob(i) { 1 } else { -1 })
        })
        .collect();
    SampleSet::new(dist.domain, dist.len(), pairs)
}
