//! Bounded-differences checks: perturb one argument of a functional and
//! record how far its value moves.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamming::{Classifier, ProductDistribution};
use crate::learning::{empirical_error, sample_dataset, LossFunction, SampleSet, SamplingDistribution};
use crate::seed::{derive_seed, derive_seed2, CHUNK};
use crate::hamming::sample_classifier;

/// Largest `m` accepted by [`bd_flip_check_eta_exhaustive`].
pub const EXHAUSTIVE_FLIP_MAX_M: usize = 20;
/// Largest number of (sample, replacement) pairs the exhaustive empirical check will visit.
pub const EXHAUSTIVE_REPLACEMENT_MAX: u128 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BdFunctional {
    Eta,
    EmpiricalError,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BdReport {
    pub functional: BdFunctional,
    /// `m` for `eta`, `n` for the empirical error.
    pub m_or_n: usize,
    /// Number of (base point, perturbed point) pairs evaluated.
    pub evaluations: u64,
    pub observed_max: Vec<f64>,
    pub observed_min: Vec<f64>,
    pub claimed: Vec<f64>,
    /// `claimed - observed_max` per coordinate.
    pub slack: Vec<f64>,
    /// Every observed difference equals its claimed value.
    pub exact: bool,
}

impl BdReport {
    /// `observed <= claimed` at every coordinate.
    pub fn within_claim(&self) -> bool {
        self.observed_max.iter().zip(&self.claimed).all(|(o, c)| o <= c)
    }

    pub fn max_observed(&self) -> f64 {
        self.observed_max.iter().copied().fold(0.0, f64::max)
    }

    fn build(functional: BdFunctional, evaluations: u64, max: Vec<f64>, min: Vec<f64>, claim: f64, exact: bool) -> Self {
        let claimed = vec![claim; max.len()];
        let slack = max.iter().map(|o| claim - o).collect();
        BdReport { functional, m_or_n: max.len(), evaluations, observed_max: max, observed_min: min, claimed, slack, exact }
    }
}

/// Per-coordinate extremes of the disagreement change `|k(f) - k(f^i)|`.
#[derive(Clone)]
struct FlipStats {
    max: Vec<u32>,
    min: Vec<u32>,
}

impl FlipStats {
    fn new(m: usize) -> Self {
        FlipStats { max: vec![0; m], min: vec![u32::MAX; m] }
    }

    fn record(&mut self, f: &Classifier, h: &Classifier) {
        let k = f.hamming_unchecked(h) as i64;
        for i in 0..f.len() {
            let d = (f.flipped(i).hamming_unchecked(h) as i64 - k).unsigned_abs() as u32;
            self.max[i] = self.max[i].max(d);
            self.min[i] = self.min[i].min(d);
        }
    }

    fn merge(mut self, other: FlipStats) -> Self {
        for i in 0..self.max.len() {
            self.max[i] = self.max[i].max(other.max[i]);
            self.min[i] = self.min[i].min(other.min[i]);
        }
        self
    }

    fn into_report(self, evaluations: u64) -> BdReport {
        let m = self.max.len() as f64;
        // |eta(f) - eta(f^i)| = 4 |Δk| / m; Δk = 1 gives exactly the claimed 4/m.
        let scale = |d: u32| 4.0 * d as f64 / m;
        let exact = self.max.iter().chain(&self.min).all(|&d| d == 1);
        BdReport::build(
            BdFunctional::Eta,
            evaluations,
            self.max.iter().map(|&d| scale(d)).collect(),
            self.min.iter().map(|&d| scale(d)).collect(),
            4.0 / m,
            exact,
        )
    }
}

/// Flips every coordinate of `trials` uniformly random `f` and records the change in `eta_h(f)`.
pub fn bd_flip_check_eta(h: &Classifier, trials: usize, seed: u64) -> Result<BdReport> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be >= 1".into()));
    }
    let p = ProductDistribution::uniform(h.domain(), h.len())?;
    let chunks = trials.div_ceil(CHUNK);
    let stats = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut s = FlipStats::new(h.len());
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                s.record(&sample_classifier(&p, derive_seed(seed, t as u64)), h);
            }
            s
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(FlipStats::new(h.len()), FlipStats::merge);
    Ok(stats.into_report((trials * h.len()) as u64))
}

/// Same check over all `2^m` functions `f`.
pub fn bd_flip_check_eta_exhaustive(h: &Classifier) -> Result<BdReport> {
    let m = h.len();
    if m > EXHAUSTIVE_FLIP_MAX_M {
        return Err(Error::Precondition(format!("exhaustive flip check needs m <= {EXHAUSTIVE_FLIP_MAX_M}")));
    }
    let total = 1u64 << m;
    let chunk = CHUNK as u64;
    let stats = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut s = FlipStats::new(m);
            for mask in c * chunk..((c + 1) * chunk).min(total) {
                s.record(&Classifier::from_mask(h.domain(), m, mask), h);
            }
            s
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(FlipStats::new(m), FlipStats::merge);
    Ok(stats.into_report(total * m as u64))
}

#[derive(Clone)]
struct ReplaceStats {
    max: Vec<f64>,
    min: Vec<f64>,
}

impl ReplaceStats {
    fn new(n: usize) -> Self {
        ReplaceStats { max: vec![0.0; n], min: vec![f64::INFINITY; n] }
    }

    fn record(&mut self, j: usize, d: f64) {
        self.max[j] = self.max[j].max(d);
        self.min[j] = self.min[j].min(d);
    }

    fn merge(mut self, other: ReplaceStats) -> Self {
        for j in 0..self.max.len() {
            self.max[j] = self.max[j].max(other.max[j]);
            self.min[j] = self.min[j].min(other.min[j]);
        }
        self
    }

    fn into_report(self, evaluations: u64, n: usize, b: f64) -> BdReport {
        BdReport::build(BdFunctional::EmpiricalError, evaluations, self.max, self.min, 2.0 * b / n as f64, false)
    }
}

/// Draws `trials` samples of size `n` from `dist`; in each, replaces every
/// pair in turn by a fresh draw and records the change in empirical error.
pub fn bd_flip_check_empirical(
    h: &Classifier,
    dist: &SamplingDistribution,
    loss: &LossFunction,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<BdReport> {
    if trials == 0 || n == 0 {
        return Err(Error::Precondition("trials and n must be >= 1".into()));
    }
    if h.domain() != dist.domain() {
        return Err(Error::DomainMismatch);
    }
    let chunks = trials.div_ceil(CHUNK);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<ReplaceStats> {
            let mut s = ReplaceStats::new(n);
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                let sample = sample_dataset(dist, n, derive_seed2(seed, 0, t as u64))?;
                let base = empirical_error(&sample, h, loss)?;
                let fresh = sample_dataset(dist, n, derive_seed2(seed, 1, t as u64))?;
                for j in 0..n {
                    let other = sample.replaced(j, fresh.pairs()[j])?;
                    s.record(j, (base - empirical_error(&other, h, loss)?).abs());
                }
            }
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    let stats = parts.into_iter().fold(ReplaceStats::new(n), ReplaceStats::merge);
    Ok(stats.into_report((trials * n) as u64, n, loss.bound()))
}

/// Visits every sample in `([m] × {±1})^n` and every single-pair replacement.
pub fn bd_flip_check_empirical_exhaustive(h: &Classifier, loss: &LossFunction, n: usize) -> Result<BdReport> {
    let m = h.len();
    if n == 0 {
        return Err(Error::Precondition("n must be >= 1".into()));
    }
    let alphabet = 2 * m as u128;
    let samples = alphabet.checked_pow(n as u32).unwrap_or(u128::MAX);
    if samples.saturating_mul(alphabet * n as u128) > EXHAUSTIVE_REPLACEMENT_MAX {
        return Err(Error::Precondition("exhaustive replacement check too large".into()));
    }
    let pair = |code: u64| ((code / 2) as usize, if code % 2 == 1 { 1i8 } else { -1 });
    let decode = |mut idx: u64| -> Vec<(usize, i8)> {
        (0..n)
            .map(|_| {
                let c = idx % alphabet as u64;
                idx /= alphabet as u64;
                pair(c)
            })
            .collect()
    };
    let total = samples as u64;
    let chunk = CHUNK as u64;
    let parts = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| -> Result<ReplaceStats> {
            let mut s = ReplaceStats::new(n);
            for idx in c * chunk..((c + 1) * chunk).min(total) {
                let sample = SampleSet::new(h.domain(), m, decode(idx))?;
                let base = empirical_error(&sample, h, loss)?;
                for j in 0..n {
                    for code in 0..alphabet as u64 {
                        let other = sample.replaced(j, pair(code))?;
                        s.record(j, (base - empirical_error(&other, h, loss)?).abs());
                    }
                }
            }
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    let stats = parts.into_iter().fold(ReplaceStats::new(n), ReplaceStats::merge);
    Ok(stats.into_report(total * n as u64 * alphabet as u64, n, loss.bound()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamming::DomainId;

    #[test]
    fn eta_flip_is_exact_on_random_draws() {
        let h: Classifier = "+-+--+++-+-".parse().unwrap();
        let r = bd_flip_check_eta(&h, 500, 3).unwrap();
        assert!(r.exact);
        assert!(r.slack.iter().all(|&s| s == 0.0));
        assert!(r.observed_max.iter().all(|&o| o == 4.0 / 11.0));
    }

    #[test]
    fn eta_flip_single_point() {
        let h: Classifier = "-".parse().unwrap();
        let r = bd_flip_check_eta_exhaustive(&h).unwrap();
        assert_eq!(r.observed_max, vec![4.0]);
        assert!(r.exact);
        assert_eq!(r.evaluations, 2);
    }

    #[test]
    fn empirical_single_sample() {
        let h: Classifier = "+-".parse().unwrap();
        let r = bd_flip_check_empirical_exhaustive(&h, &LossFunction::zero_one(), 1).unwrap();
        assert_eq!(r.observed_max, vec![1.0]);
        assert_eq!(r.observed_min, vec![0.0]);
        assert_eq!(r.claimed, vec![2.0]);
        assert!(r.within_claim());
    }

    #[test]
    fn empirical_random_replacements() {
        let h: Classifier = "+-++".parse().unwrap();
        let d = SamplingDistribution::uniform(DomainId::cube(4), 4, 0.3).unwrap();
        let loss = LossFunction::new([[0.0, 1.5], [0.5, 0.0]]).unwrap();
        let r = bd_flip_check_empirical(&h, &d, &loss, 5, 300, 9).unwrap();
        assert!(r.within_claim());
        assert_eq!(r.claimed[0], 2.0 * 1.5 / 5.0);
        assert!(r.max_observed() <= 1.5 / 5.0 + 1e-12);
    }
}
