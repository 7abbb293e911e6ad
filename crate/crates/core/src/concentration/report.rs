//! Experiment reports: parallel per-row arrays plus per-experiment summaries.

use std::io::Write;

use serde::Serialize;

use crate::concentration::bounds::BoundKind;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    ApproxConcentration,
    UniformConvergence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportParameters {
    /// Domain size.
    pub m: usize,
    /// Length of the hypothesis list as given.
    pub card_h: usize,
    /// Number of distinct classifiers, `card H(X)`; the growth value in every bound.
    pub growth_used: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<usize>>,
    /// Loss range `b`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

/// Distribution of `dist²` and of `max_h |<f, h>|` over the trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceSummary {
    pub mean: f64,
    pub variance: f64,
    pub min: f64,
    pub max: f64,
    pub q01: f64,
    pub q50: f64,
    pub q99: f64,
    /// `[k, count]` for `dist² = 4k/m`, ascending in `k`, zero counts omitted.
    pub histogram: Vec<[u64; 2]>,
    /// `[a, count]` for `max_h |<f, h>| = a/m`.
    pub max_abs_inner_histogram: Vec<[u64; 2]>,
    pub max_abs_inner_q99: f64,
}

impl DistanceSummary {
    pub(crate) fn from_histograms(m: usize, trials: u64, dist: &[u64], inner: &[u64]) -> Self {
        let scale = 4.0 / m as f64;
        let total: u128 = dist.iter().enumerate().map(|(k, &c)| k as u128 * c as u128).sum();
        let total_sq: u128 = dist.iter().enumerate().map(|(k, &c)| (k * k) as u128 * c as u128).sum();
        let mean_k = total as f64 / trials as f64;
        let var_k = (total_sq as f64 / trials as f64 - mean_k * mean_k).max(0.0);
        let first = dist.iter().position(|&c| c > 0).unwrap_or(0);
        let last = dist.iter().rposition(|&c| c > 0).unwrap_or(0);
        DistanceSummary {
            mean: scale * mean_k,
            variance: scale * scale * var_k,
            min: scale * first as f64,
            max: scale * last as f64,
            q01: scale * quantile(dist, trials, 0.01) as f64,
            q50: scale * quantile(dist, trials, 0.50) as f64,
            q99: scale * quantile(dist, trials, 0.99) as f64,
            histogram: sparse(dist),
            max_abs_inner_histogram: sparse(inner),
            max_abs_inner_q99: quantile(inner, trials, 0.99) as f64 / m as f64,
        }
    }

    /// Fraction of trials with `lo <= dist² <= hi`.
    pub fn mass_within(&self, m: usize, lo: f64, hi: f64) -> f64 {
        let total: u64 = self.histogram.iter().map(|e| e[1]).sum();
        let inside: u64 = self
            .histogram
            .iter()
            .filter(|e| {
                let v = 4.0 * e[0] as f64 / m as f64;
                lo <= v && v <= hi
            })
            .map(|e| e[1])
            .sum();
        inside as f64 / total as f64
    }
}

/// Smallest bin index whose cumulative count reaches `ceil(q · trials)`.
fn quantile(hist: &[u64], trials: u64, q: f64) -> usize {
    let target = ((q * trials as f64).ceil() as u64).max(1);
    let mut acc = 0;
    for (k, &c) in hist.iter().enumerate() {
        acc += c;
        if acc >= target {
            return k;
        }
    }
    hist.len().saturating_sub(1)
}

fn sparse(hist: &[u64]) -> Vec<[u64; 2]> {
    hist.iter().enumerate().filter(|(_, &c)| c > 0).map(|(k, &c)| [k as u64, c]).collect()
}

/// Sup-deviation statistics per sample size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationSummary {
    pub n: Vec<usize>,
    pub median_sup_deviation: Vec<f64>,
    pub mean_sup_deviation: Vec<f64>,
    pub max_sup_deviation: Vec<f64>,
    pub median_strictly_decreasing: bool,
}

/// Monte Carlo frequencies next to the guarantees they are compared with.
///
/// Row `r` of the parallel arrays is one (event, size, λ) combination. For
/// the approximation events the exponent has a single form, so
/// `bound_printed` and `bound_derived` coincide.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub kind: ExperimentKind,
    pub parameters: ReportParameters,
    pub seed: u64,
    pub trials: u64,
    /// `mu_{H(X)}` for approximation experiments.
    pub mu_used: Option<f64>,
    pub event: Vec<BoundKind>,
    /// `m` or `n` of each row.
    pub n: Vec<usize>,
    pub lambda_grid: Vec<f64>,
    pub successes: Vec<u64>,
    pub empirical_freq: Vec<f64>,
    pub bound_printed: Vec<f64>,
    pub bound_derived: Vec<f64>,
    pub log_failure_printed: Vec<f64>,
    pub log_failure_derived: Vec<f64>,
    /// Binomial standard error `sqrt(B (1 - B) / trials)` of the printed bound.
    pub sigma: Vec<f64>,
    pub violated_printed: Vec<bool>,
    pub violated_derived: Vec<bool>,
    /// Either variant violated by more than three standard errors.
    pub violated: Vec<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<DistanceSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation: Option<DeviationSummary>,
}

/// Values needed to append one row.
pub(crate) struct Row {
    pub event: BoundKind,
    pub n: usize,
    pub lambda: f64,
    pub successes: u64,
    pub printed: (f64, f64),
    pub derived: (f64, f64),
}

/// Shortest round-trip text, switching to exponent form for very large or small values.
pub fn fnum(x: f64) -> String {
    format!("{x:?}")
}

/// Frequency below `bound - 3 sqrt(bound (1 - bound) / trials)`.
pub fn is_violation(freq: f64, bound: f64, trials: u64) -> bool {
    freq < bound - 3.0 * binomial_sigma(bound, trials)
}

pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).max(0.0).sqrt()
}

impl ConcentrationReport {
    pub(crate) fn empty(kind: ExperimentKind, parameters: ReportParameters, seed: u64, trials: u64) -> Self {
        ConcentrationReport {
            kind,
            parameters,
            seed,
            trials,
            mu_used: None,
            event: Vec::new(),
            n: Vec::new(),
            lambda_grid: Vec::new(),
            successes: Vec::new(),
            empirical_freq: Vec::new(),
            bound_printed: Vec::new(),
            bound_derived: Vec::new(),
            log_failure_printed: Vec::new(),
            log_failure_derived: Vec::new(),
            sigma: Vec::new(),
            violated_printed: Vec::new(),
            violated_derived: Vec::new(),
            violated: Vec::new(),
            distance: None,
            deviation: None,
        }
    }

    pub(crate) fn push(&mut self, row: Row) {
        let freq = row.successes as f64 / self.trials as f64;
        let vp = is_violation(freq, row.printed.0, self.trials);
        let vd = is_violation(freq, row.derived.0, self.trials);
        self.event.push(row.event);
        self.n.push(row.n);
        self.lambda_grid.push(row.lambda);
        self.successes.push(row.successes);
        self.empirical_freq.push(freq);
        self.bound_printed.push(row.printed.0);
        self.log_failure_printed.push(row.printed.1);
        self.bound_derived.push(row.derived.0);
        self.log_failure_derived.push(row.derived.1);
        self.sigma.push(binomial_sigma(row.printed.0, self.trials));
        self.violated_printed.push(vp);
        self.violated_derived.push(vd);
        self.violated.push(vp || vd);
    }

    pub fn rows(&self) -> usize {
        self.event.len()
    }

    pub fn any_violation(&self) -> bool {
        self.violated.iter().any(|&v| v)
    }

    /// Row index of `(event, n, λ)`, matching λ exactly.
    pub fn find(&self, event: BoundKind, n: usize, lambda: f64) -> Option<usize> {
        (0..self.rows()).find(|&r| self.event[r] == event && self.n[r] == n && self.lambda_grid[r] == lambda)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    /// One CSV row per report row; floats in shortest round-trip form.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record([
            "event",
            "n",
            "lambda",
            "trials",
            "successes",
            "empirical_freq",
            "bound_printed",
            "bound_derived",
            "log_failure_printed",
            "log_failure_derived",
            "sigma",
            "violated",
            "median_sup_deviation",
        ])
        .map_err(io)?;
        for r in 0..self.rows() {
            let event = serde_json::to_value(self.event[r]).map_err(|e| Error::Io(e.to_string()))?;
            let median = self
                .deviation
                .as_ref()
                .and_then(|d| d.n.iter().position(|&n| n == self.n[r]).map(|i| fnum(d.median_sup_deviation[i])))
                .unwrap_or_default();
            w.write_record([
                event.as_str().unwrap_or_default().to_string(),
                self.n[r].to_string(),
                fnum(self.lambda_grid[r]),
                self.trials.to_string(),
                self.successes[r].to_string(),
                fnum(self.empirical_freq[r]),
                fnum(self.bound_printed[r]),
                fnum(self.bound_derived[r]),
                fnum(self.log_failure_printed[r]),
                fnum(self.log_failure_derived[r]),
                fnum(self.sigma[r]),
                self.violated[r].to_string(),
                median,
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_from_histogram() {
        let hist = [0, 10, 80, 10];
        assert_eq!(quantile(&hist, 100, 0.01), 1);
        assert_eq!(quantile(&hist, 100, 0.5), 2);
        assert_eq!(quantile(&hist, 100, 0.99), 3);
        let s = DistanceSummary::from_histograms(4, 100, &hist, &[0, 0, 0, 0, 100]);
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.histogram, vec![[1, 10], [2, 80], [3, 10]]);
        assert_eq!(s.max_abs_inner_q99, 1.0);
        assert_eq!(s.mass_within(4, 1.5, 2.0), 0.8);
        assert_eq!(s.mass_within(4, 1.0, 3.0), 1.0);
    }

    #[test]
    fn violation_band() {
        assert!(!is_violation(0.5, 0.5, 100));
        assert!(!is_violation(0.36, 0.5, 100));
        assert!(is_violation(0.34, 0.5, 100));
        assert!(is_violation(0.99, 1.0, 10));
        assert!(!is_violation(0.0, 0.0, 10));
    }
}
