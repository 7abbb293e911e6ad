//! Monte Carlo experiments for the approximation and uniform-convergence events.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::concentration::bounds::{thm2_bounds, thm3_bound, BoundKind};
use crate::concentration::report::{
    ConcentrationReport, DeviationSummary, DistanceSummary, ExperimentKind, ReportParameters, Row,
};
use crate::error::{Error, Result};
use crate::hamming::{mu_class, sample_classifier, Classifier, Eta, NormalizedInner, ProductDistribution};
use crate::learning::{empirical_error_tally, sample_dataset, true_error, LossFunction, SamplingDistribution};
use crate::seed::{derive_seed, derive_seed2, CHUNK};

/// Outcome of one approximation trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxTrial {
    pub f: Classifier,
    /// `min_h eta_h(f)`.
    pub dist_sq: Eta,
    /// Largest Hamming distance to any member.
    pub max_disagreements: usize,
}

impl ApproxTrial {
    /// `max_h <f, h>` (signed).
    pub fn max_inner(&self) -> NormalizedInner {
        let m = self.dist_sq.m;
        NormalizedInner { numerator: m as i64 - 2 * self.dist_sq.disagreements as i64, m }
    }

    /// `max_h |<f, h>|` as a numerator over `m`.
    pub fn max_abs_inner_numerator(&self) -> u64 {
        let m = self.dist_sq.m as i64;
        (m - 2 * self.dist_sq.disagreements as i64).max(2 * self.max_disagreements as i64 - m) as u64
    }
}

/// Runs trial `t` of an approximation experiment seeded with `seed`.
pub fn approx_trial(class: &[Classifier], p: &ProductDistribution, seed: u64, t: u64) -> ApproxTrial {
    let f = sample_classifier(p, derive_seed(seed, t));
    let (mut lo, mut hi) = (usize::MAX, 0);
    for h in class {
        let k = f.hamming_unchecked(h);
        lo = lo.min(k);
        hi = hi.max(k);
    }
    let m = f.len();
    ApproxTrial { f, dist_sq: Eta { disagreements: lo, m }, max_disagreements: hi }
}

fn check_grid(lambda_grid: &[f64]) -> Result<()> {
    if let Some(l) = lambda_grid.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
        return Err(Error::Precondition(format!("lambda {l} is not positive")));
    }
    Ok(())
}

fn check_class(class: &[Classifier], domain: crate::hamming::DomainId, m: usize) -> Result<()> {
    if class.is_empty() {
        return Err(Error::EmptyClass);
    }
    for h in class {
        if h.domain() != domain {
            return Err(Error::DomainMismatch);
        }
        if h.len() != m {
            return Err(Error::LengthMismatch { expected: m, got: h.len() });
        }
    }
    Ok(())
}

fn distinct(class: &[Classifier]) -> u64 {
    class.iter().collect::<BTreeSet<_>>().len() as u64
}

/// Draws `trials` functions from `p` and records how often
/// `dist² >= mu - λ` and `dist² <= mu + λ` hold, next to the guarantees
/// evaluated with growth `card H(X)`.
pub fn approx_concentration_experiment(
    class: &[Classifier],
    p: &ProductDistribution,
    lambda_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be >= 1".into()));
    }
    check_class(class, p.domain(), p.len())?;
    check_grid(lambda_grid)?;
    let m = p.len();
    let (mu, _) = mu_class(class, p)?;

    // Integer histograms of k_min and of max |m - 2k|; merging is exact, so the
    // result does not depend on scheduling.
    let chunks = trials.div_ceil(CHUNK);
    let parts: Vec<(Vec<u64>, Vec<u64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut dist = vec![0u64; m + 1];
            let mut inner = vec![0u64; m + 1];
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                let tr = approx_trial(class, p, seed, t as u64);
                dist[tr.dist_sq.disagreements] += 1;
                inner[tr.max_abs_inner_numerator() as usize] += 1;
            }
            (dist, inner)
        })
        .collect();
    let mut dist = vec![0u64; m + 1];
    let mut inner = vec![0u64; m + 1];
    for (d, i) in parts {
        dist.iter_mut().zip(d).for_each(|(a, b)| *a += b);
        inner.iter_mut().zip(i).for_each(|(a, b)| *a += b);
    }

    let growth = distinct(class);
    let params = ReportParameters { m, card_h: class.len(), growth_used: growth, n_grid: None, b: None };
    let mut report = ConcentrationReport::empty(ExperimentKind::ApproxConcentration, params, seed, trials as u64);
    report.mu_used = Some(mu);
    let value = |k: usize| 4.0 * k as f64 / m as f64;
    for &lambda in lambda_grid {
        let t = thm2_bounds(m, lambda, growth)?;
        let lower: u64 = (0..=m).filter(|&k| value(k) >= mu - lambda).map(|k| dist[k]).sum();
        let upper: u64 = (0..=m).filter(|&k| value(k) <= mu + lambda).map(|k| dist[k]).sum();
        report.push(Row {
            event: BoundKind::Thm2Lower,
            n: m,
            lambda,
            successes: lower,
            printed: (t.lower, t.log_fail_lower),
            derived: (t.lower, t.log_fail_lower),
        });
        report.push(Row {
            event: BoundKind::Thm2Upper,
            n: m,
            lambda,
            successes: upper,
            printed: (t.upper, t.log_fail_upper),
            derived: (t.upper, t.log_fail_upper),
        });
    }
    report.distance = Some(DistanceSummary::from_histograms(m, trials as u64, &dist, &inner));
    Ok(report)
}

/// `sup_h |E_n(S, h) - E(h)|` for trial `t` at sample size `n`.
pub fn uniform_trial(
    class: &[Classifier],
    truth: &[f64],
    dist: &SamplingDistribution,
    loss: &LossFunction,
    n: usize,
    seed: u64,
) -> Result<f64> {
    let sample = sample_dataset(dist, n, seed)?;
    let tally = sample.tally();
    Ok(class
        .iter()
        .zip(truth)
        .map(|(h, e)| (empirical_error_tally(&tally, n, h, loss) - e).abs())
        .fold(0.0, f64::max))
}

/// For each `n`, draws `trials` samples and records how often the
/// sup-deviation over the class is at most λ, for every λ in the grid and
/// for `λ = n^{-1/4}`.
pub fn uniform_convergence_experiment(
    class: &[Classifier],
    dist: &SamplingDistribution,
    loss: &LossFunction,
    n_grid: &[usize],
    lambda_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be >= 1".into()));
    }
    if n_grid.is_empty() || n_grid.contains(&0) {
        return Err(Error::Precondition("n_grid must be nonempty with positive entries".into()));
    }
    check_class(class, dist.domain(), dist.len())?;
    check_grid(lambda_grid)?;
    let truth: Vec<f64> = class.iter().map(|h| true_error(h, dist, loss)).collect::<Result<_>>()?;
    let growth = distinct(class);
    let b = loss.bound();
    let params = ReportParameters {
        m: dist.len(),
        card_h: class.len(),
        growth_used: growth,
        n_grid: Some(n_grid.to_vec()),
        b: Some(b),
    };
    let mut report = ConcentrationReport::empty(ExperimentKind::UniformConvergence, params, seed, trials as u64);
    let mut summary = DeviationSummary {
        n: Vec::new(),
        median_sup_deviation: Vec::new(),
        mean_sup_deviation: Vec::new(),
        max_sup_deviation: Vec::new(),
        median_strictly_decreasing: true,
    };

    for (gi, &n) in n_grid.iter().enumerate() {
        let chunks = trials.div_ceil(CHUNK);
        let sups: Vec<f64> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                (c * CHUNK..((c + 1) * CHUNK).min(trials))
                    .map(|t| uniform_trial(class, &truth, dist, loss, n, derive_seed2(seed, gi as u64, t as u64)))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();

        let mut lambdas = lambda_grid.to_vec();
        let corollary = (n as f64).powf(-0.25);
        if !lambdas.contains(&corollary) {
            lambdas.push(corollary);
        }
        for lambda in lambdas {
            let t = thm3_bound(n, lambda, b, growth)?;
            let successes = sups.iter().filter(|&&s| s <= lambda).count() as u64;
            report.push(Row {
                event: BoundKind::Thm3,
                n,
                lambda,
                successes,
                printed: (t.printed, t.log_fail_printed),
                derived: (t.derived, t.log_fail_derived),
            });
        }

        let mut sorted = sups.clone();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 { sorted[mid] } else { (sorted[mid - 1] + sorted[mid]) / 2.0 };
        // Sequential sum in trial order keeps the mean reproducible.
        let mean = sups.iter().sum::<f64>() / trials as f64;
        if summary.median_sup_deviation.last().is_some_and(|&prev| median >= prev) {
            summary.median_strictly_decreasing = false;
        }
        summary.n.push(n);
        summary.median_sup_deviation.push(median);
        summary.mean_sup_deviation.push(mean);
        summary.max_sup_deviation.push(*sorted.last().expect("trials >= 1"));
    }
    report.deviation = Some(summary);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamming::{normalized_inner, DomainId};
    use crate::learning::LabelLaw;

    #[test]
    fn degenerate_distribution_sits_on_the_class() {
        let h: Classifier = "+--+-".parse().unwrap();
        let other: Classifier = "+++++".parse().unwrap();
        let p = ProductDistribution::new(h.domain(), h.labels().iter().map(|&y| if y > 0 { 1.0 } else { 0.0 }).collect())
            .unwrap();
        let r = approx_concentration_experiment(&[h, other], &p, &[0.05, 0.5], 200, 1).unwrap();
        assert_eq!(r.mu_used, Some(0.0));
        assert!(r.empirical_freq.iter().all(|&f| f == 1.0));
        assert_eq!(r.distance.as_ref().unwrap().max, 0.0);
    }

    #[test]
    fn identity_between_distance_and_inner_product() {
        let class: Vec<Classifier> =
            (0..5).map(|i| sample_classifier(&ProductDistribution::uniform(DomainId::cube(37), 37).unwrap(), i)).collect();
        let p = ProductDistribution::uniform(DomainId::cube(37), 37).unwrap();
        for t in 0..200 {
            let tr = approx_trial(&class, &p, 5, t);
            let best = class.iter().map(|h| normalized_inner(&tr.f, h).unwrap().numerator).max().unwrap();
            assert_eq!(tr.max_inner().numerator, best);
            // 4k/m = 2 - 2(m - 2k)/m, compared as integers over m.
            assert_eq!(tr.dist_sq.numerator() as i64, 2 * 37 - 2 * best);
        }
    }

    #[test]
    fn constant_labels_give_zero_deviation() {
        // Deterministic labels and a classifier that always matches them.
        let h: Classifier = "++++".parse().unwrap();
        let d = SamplingDistribution::new(DomainId::cube(4), vec![0.25; 4], LabelLaw::Iid(1.0)).unwrap();
        let r = uniform_convergence_experiment(&[h], &d, &LossFunction::zero_one(), &[3, 9], &[0.01], 100, 4).unwrap();
        let dev = r.deviation.clone().unwrap();
        assert!(dev.max_sup_deviation.iter().all(|&x| x == 0.0));
        assert!(r.empirical_freq.iter().all(|&f| f == 1.0));
        // λ = n^{-1/4} is appended per n.
        assert_eq!(r.rows(), 4);
    }

    #[test]
    fn rejects_bad_input() {
        let p = ProductDistribution::uniform(DomainId::cube(3), 3).unwrap();
        assert_eq!(approx_concentration_experiment(&[], &p, &[0.1], 10, 0).unwrap_err(), Error::EmptyClass);
        let h: Classifier = "+++".parse().unwrap();
        assert!(approx_concentration_experiment(&[h.clone()], &p, &[0.0], 10, 0).is_err());
        assert!(approx_concentration_experiment(&[h], &p, &[0.1], 0, 0).is_err());
    }
}
