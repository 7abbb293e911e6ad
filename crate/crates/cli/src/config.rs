//! Experiment configuration: parsing, validation and default resolution.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use finvc::classes::vc::K_MAX_LIMIT;
use finvc::seed::derive_seed;

use crate::error::{CliError, Diagnostic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Growth,
    VcDim,
    ApproxConcentration,
    UniformConvergence,
    BdCheck,
    BoundsTable,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Growth => "growth",
            Command::VcDim => "vc-dim",
            Command::ApproxConcentration => "approx-concentration",
            Command::UniformConvergence => "uniform-convergence",
            Command::BdCheck => "bd-check",
            Command::BoundsTable => "bounds-table",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
    #[default]
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        self != Format::Csv
    }

    pub fn csv(self) -> bool {
        self != Format::Json
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainSpec {
    /// Points listed in the config.
    Inline { points: Vec<Vec<f64>> },
    /// One point per row; `.json` files hold `{"points": [...]}`.
    File { path: PathBuf },
    /// Standard normal cloud in `R^d`, resampled until in general position.
    Random {
        m: usize,
        d: usize,
        seed: Option<u64>,
        max_retries: Option<usize>,
    },
    /// `m` abstract points with no coordinates.
    Cube { m: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HypothesisSpec {
    /// `+`/`-` strings, inline or one per line in a file.
    Explicit {
        classifiers: Option<Vec<String>>,
        path: Option<PathBuf>,
    },
    /// `count` classifiers drawn uniformly from the cube.
    Random { count: usize, seed: Option<u64> },
    Halfspace,
    Relu { hidden: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DistributionSpec {
    Uniform,
    Probs { probs: Vec<f64> },
    /// Independent flips of a center classifier, given as a string or by
    /// index into the hypothesis list.
    Concentrated {
        center: Option<String>,
        center_index: Option<usize>,
        flip: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    /// `P_X`; uniform when absent.
    pub x_weights: Option<Vec<f64>>,
    /// `P(y = +1 | x)` for every point.
    pub p0: Option<f64>,
    /// Per-point `P(y = +1 | x)`; overrides `p0`.
    pub label_probs: Option<Vec<f64>>,
    /// `loss[y][y_hat]` with index 0 for `-1`; 0-1 loss when absent.
    pub loss: Option<[[f64; 2]; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    pub k_max: Option<usize>,
    pub relu_samples: Option<usize>,
    pub relu_range: Option<f64>,
    pub cap: Option<usize>,
    pub d_v: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BdFunctionalChoice {
    Eta,
    Empirical,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BdSpec {
    pub functional: Option<BdFunctionalChoice>,
    /// Enumerate every input instead of sampling.
    pub exhaustive: Option<bool>,
    /// Sample size for the empirical-error check.
    pub n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSpec {
    pub m_grid: Option<Vec<u64>>,
    pub d_v: Option<u64>,
    /// Loss range for the uniform-convergence columns.
    pub b: Option<f64>,
    /// Network depth `L` and parameter count `W` for the Bartlett column.
    pub relu_depth: Option<u64>,
    pub relu_params: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<HypothesisSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<DistributionSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<ClassSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bd: Option<BdSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

pub const DEFAULT_TRIALS: usize = 10_000;
pub const DEFAULT_LAMBDAS: [f64; 5] = [0.05, 0.1, 0.2, 0.4, 0.8];
pub const DEFAULT_N_GRID: [usize; 4] = [16, 64, 256, 1024];
pub const DEFAULT_M_GRID: [u64; 4] = [1_000, 10_000, 100_000, 1_000_000];

impl ExperimentConfig {
    /// Reads TOML or JSON (by extension, falling back to content sniffing).
    /// A run manifest is accepted too; its `resolved_config` is used.
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
        let mut cfg = if json { Self::from_json_str(&text)? } else { Self::from_toml_str(&text)? };
        cfg.anchor_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config(vec![Diagnostic::new("config", e.message())]))
    }

    pub fn from_json_str(text: &str) -> Result<Self, CliError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::config(vec![Diagnostic::new("config", e.to_string())]))?;
        let value = match value.get("resolved_config") {
            Some(inner) => inner.clone(),
            None => value,
        };
        serde_json::from_value(value).map_err(|e| CliError::config(vec![Diagnostic::new("config", e.to_string())]))
    }

    /// Makes relative file paths relative to the config file's directory.
    fn anchor_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
            if let Ok(abs) = std::fs::canonicalize(&*p) {
                *p = abs;
            }
        };
        if let Some(DomainSpec::File { path }) = &mut self.domain {
            fix(path);
        }
        if let Some(HypothesisSpec::Explicit { path: Some(path), .. }) = &mut self.hypothesis {
            fix(path);
        }
    }

    pub fn format(&self) -> Format {
        self.output.as_ref().and_then(|o| o.format).unwrap_or_default()
    }

    /// Every problem found, not just the first.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut d = Vec::new();
        let Some(cmd) = self.command else {
            d.push(Diagnostic::new("command", "no command given"));
            return d;
        };
        if self.trials == Some(0) {
            d.push(Diagnostic::new("trials", "trials must be at least 1"));
        }
        if let Some(grid) = &self.lambda_grid {
            for l in grid {
                if !(l.is_finite() && *l > 0.0) {
                    d.push(Diagnostic::new("lambda_grid", format!("lambda {l} must be positive")));
                }
            }
        }
        if let Some(grid) = &self.n_grid {
            if grid.is_empty() {
                d.push(Diagnostic::new("n_grid", "n_grid is empty"));
            }
            if grid.contains(&0) {
                d.push(Diagnostic::new("n_grid", "n_grid entries must be positive"));
            }
        }
        let m = self.validate_domain(&mut d);
        self.validate_hypothesis(cmd, m, &mut d);
        self.validate_distribution(m, &mut d);
        self.validate_sampling(m, &mut d);
        if let Some(c) = &self.class {
            if c.k_max.is_some_and(|k| k > K_MAX_LIMIT) {
                d.push(Diagnostic::new("class.k_max", format!("k_max exceeds {K_MAX_LIMIT}")));
            }
            if c.relu_range.is_some_and(|r| !(r.is_finite() && r > 0.0)) {
                d.push(Diagnostic::new("class.relu_range", "relu_range must be positive"));
            }
            if c.relu_samples == Some(0) {
                d.push(Diagnostic::new("class.relu_samples", "relu_samples must be at least 1"));
            }
        }
        if let Some(bd) = &self.bd {
            if bd.n == Some(0) {
                d.push(Diagnostic::new("bd.n", "n must be at least 1"));
            }
        }
        if cmd == Command::BoundsTable {
            let b = self.bounds.as_ref();
            if b.and_then(|b| b.d_v).is_none() {
                d.push(Diagnostic::new("bounds.d_v", "bounds-table needs d_v"));
            }
            if let Some(grid) = b.and_then(|b| b.m_grid.as_ref()) {
                if grid.is_empty() || grid.contains(&0) {
                    d.push(Diagnostic::new("bounds.m_grid", "m_grid entries must be positive"));
                }
            }
            if b.and_then(|b| b.b).is_some_and(|x| !(x.is_finite() && x > 0.0)) {
                d.push(Diagnostic::new("bounds.b", "b must be positive"));
            }
            if b.is_some_and(|b| b.relu_depth.is_some() != b.relu_params.is_some()) {
                d.push(Diagnostic::new("bounds", "relu_depth and relu_params go together"));
            }
        } else if self.domain.is_none() {
            d.push(Diagnostic::new("domain", format!("{} needs a domain", cmd.name())));
        }
        d
    }

    fn validate_domain(&self, d: &mut Vec<Diagnostic>) -> Option<usize> {
        match self.domain.as_ref()? {
            DomainSpec::Inline { points } => {
                if points.is_empty() {
                    d.push(Diagnostic::new("domain.points", "domain has no points"));
                    return None;
                }
                Some(points.len())
            }
            DomainSpec::File { path } => {
                if !path.exists() {
                    d.push(Diagnostic::new("domain.path", format!("{} not found", path.display())));
                }
                None
            }
            DomainSpec::Random { m, d: dim, .. } => {
                if *m == 0 || *dim == 0 {
                    d.push(Diagnostic::new("domain", "random domain needs m >= 1 and d >= 1"));
                    return None;
                }
                Some(*m)
            }
            DomainSpec::Cube { m } => {
                if *m == 0 {
                    d.push(Diagnostic::new("domain.m", "m must be at least 1"));
                    return None;
                }
                Some(*m)
            }
        }
    }

    fn validate_hypothesis(&self, cmd: Command, m: Option<usize>, d: &mut Vec<Diagnostic>) {
        let needs = matches!(
            cmd,
            Command::Growth | Command::VcDim | Command::ApproxConcentration | Command::UniformConvergence | Command::BdCheck
        );
        let Some(h) = &self.hypothesis else {
            if needs {
                d.push(Diagnostic::new("hypothesis", format!("{} needs a hypothesis class", cmd.name())));
            }
            return;
        };
        let geometric = matches!(h, HypothesisSpec::Halfspace | HypothesisSpec::Relu { .. });
        if geometric && matches!(self.domain, Some(DomainSpec::Cube { .. })) {
            d.push(Diagnostic::new("hypothesis", "halfspace and relu classes need a domain with coordinates"));
        }
        match h {
            HypothesisSpec::Explicit { classifiers, path } => {
                match (classifiers, path) {
                    (None, None) => d.push(Diagnostic::new("hypothesis", "hypothesis class empty")),
                    (Some(_), Some(_)) => {
                        d.push(Diagnostic::new("hypothesis", "give either classifiers or path, not both"))
                    }
                    (Some(list), None) if list.is_empty() => {
                        d.push(Diagnostic::new("hypothesis.classifiers", "hypothesis class empty"))
                    }
                    (None, Some(p)) if !p.exists() => {
                        d.push(Diagnostic::new("hypothesis.path", format!("{} not found", p.display())))
                    }
                    _ => {}
                }
                for (i, s) in classifiers.iter().flatten().enumerate() {
                    if s.is_empty() || s.chars().any(|c| c != '+' && c != '-') {
                        d.push(Diagnostic::new(format!("hypothesis.classifiers[{i}]"), "use only '+' and '-'"));
                    } else if m.is_some_and(|m| s.len() != m) {
                        d.push(Diagnostic::new(
                            format!("hypothesis.classifiers[{i}]"),
                            format!("length {} does not match domain size {}", s.len(), m.unwrap_or(0)),
                        ));
                    }
                }
            }
            HypothesisSpec::Random { count, .. } => {
                if *count == 0 {
                    d.push(Diagnostic::new("hypothesis.count", "hypothesis class empty"));
                }
            }
            HypothesisSpec::Halfspace => {}
            HypothesisSpec::Relu { hidden } => {
                if hidden.is_empty() || hidden.contains(&0) {
                    d.push(Diagnostic::new("hypothesis.hidden", "hidden widths must be positive"));
                }
            }
        }
    }

    fn validate_distribution(&self, m: Option<usize>, d: &mut Vec<Diagnostic>) {
        match &self.distribution {
            Some(DistributionSpec::Probs { probs }) => {
                if m.is_some_and(|m| probs.len() != m) {
                    d.push(Diagnostic::new("distribution.probs", "one probability per point"));
                }
                if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
                    d.push(Diagnostic::new("distribution.probs", "probabilities must lie in [0, 1]"));
                }
            }
            Some(DistributionSpec::Concentrated { center, center_index, flip }) => {
                if !(0.0..=1.0).contains(flip) {
                    d.push(Diagnostic::new("distribution.flip", "flip must lie in [0, 1]"));
                }
                if center.is_some() == center_index.is_some() {
                    d.push(Diagnostic::new("distribution", "give exactly one of center, center_index"));
                }
                if let (Some(c), Some(m)) = (center, m) {
                    if c.len() != m {
                        d.push(Diagnostic::new("distribution.center", "center length does not match domain size"));
                    }
                }
            }
            _ => {}
        }
    }

    fn validate_sampling(&self, m: Option<usize>, d: &mut Vec<Diagnostic>) {
        let Some(s) = &self.sampling else { return };
        if let Some(w) = &s.x_weights {
            if m.is_some_and(|m| w.len() != m) {
                d.push(Diagnostic::new("sampling.x_weights", "one weight per point"));
            }
            if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                d.push(Diagnostic::new("sampling.x_weights", "weights must be nonnegative"));
            } else if (w.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                d.push(Diagnostic::new("sampling.x_weights", "weights must sum to 1"));
            }
        }
        if s.p0.is_some_and(|p| !(0.0..=1.0).contains(&p)) {
            d.push(Diagnostic::new("sampling.p0", "p0 must lie in [0, 1]"));
        }
        if let Some(lp) = &s.label_probs {
            if m.is_some_and(|m| lp.len() != m) {
                d.push(Diagnostic::new("sampling.label_probs", "one probability per point"));
            }
            if lp.iter().any(|p| !(0.0..=1.0).contains(p)) {
                d.push(Diagnostic::new("sampling.label_probs", "probabilities must lie in [0, 1]"));
            }
        }
        if let Some(loss) = &s.loss {
            let flat = loss.iter().flatten();
            if flat.clone().any(|x| !(x.is_finite() && *x >= 0.0)) {
                d.push(Diagnostic::new("sampling.loss", "loss entries must be finite and nonnegative"));
            } else if flat.clone().all(|&x| x == 0.0) {
                d.push(Diagnostic::new("sampling.loss", "loss is identically zero"));
            }
        }
    }

    /// Fills every default so the result is self-contained. Seeds for
    /// random sub-objects are derived from the top-level seed.
    pub fn resolve(mut self, generated_seed: impl FnOnce() -> u64) -> Self {
        let cmd = self.command.expect("validated");
        let seed = *self.seed.get_or_insert_with(generated_seed);
        if let Some(DomainSpec::Random { seed: s, max_retries, .. }) = &mut self.domain {
            s.get_or_insert(derive_seed(seed, 1));
            max_retries.get_or_insert(100);
        }
        if let Some(HypothesisSpec::Random { seed: s, .. }) = &mut self.hypothesis {
            s.get_or_insert(derive_seed(seed, 2));
        }
        let uses_trials = matches!(cmd, Command::ApproxConcentration | Command::UniformConvergence | Command::BdCheck);
        if uses_trials {
            self.trials.get_or_insert(DEFAULT_TRIALS);
        }
        match cmd {
            Command::ApproxConcentration => {
                let m = self.domain_size();
                self.lambda_grid.get_or_insert_with(|| {
                    let mut g = DEFAULT_LAMBDAS.to_vec();
                    if let Some(m) = m {
                        g.push((m as f64).powf(-0.25));
                    }
                    g
                });
                self.distribution.get_or_insert(DistributionSpec::Uniform);
            }
            Command::UniformConvergence => {
                self.lambda_grid.get_or_insert_with(|| DEFAULT_LAMBDAS.to_vec());
                self.n_grid.get_or_insert_with(|| DEFAULT_N_GRID.to_vec());
                let s = self.sampling.get_or_insert(SamplingSpec { x_weights: None, p0: None, label_probs: None, loss: None });
                if s.label_probs.is_none() {
                    s.p0.get_or_insert(0.5);
                }
                s.loss.get_or_insert([[0.0, 1.0], [1.0, 0.0]]);
            }
            Command::BdCheck => {
                let bd = self.bd.get_or_insert(BdSpec { functional: None, exhaustive: None, n: None });
                bd.functional.get_or_insert(BdFunctionalChoice::Both);
                bd.n.get_or_insert(3);
                let n = bd.n.unwrap_or(3) as u32;
                // Exhaustive when every input fits the enumeration budget of the core checks.
                let small = self.domain_size().is_some_and(|m| {
                    let a = 2 * m as u128;
                    m <= 10 && a.checked_pow(n).is_some_and(|s| s.saturating_mul(a * n as u128) <= 1 << 26)
                });
                let bd = self.bd.as_mut().expect("set above");
                bd.exhaustive.get_or_insert(small);
                let s = self.sampling.get_or_insert(SamplingSpec { x_weights: None, p0: None, label_probs: None, loss: None });
                if s.label_probs.is_none() {
                    s.p0.get_or_insert(0.5);
                }
                s.loss.get_or_insert([[0.0, 1.0], [1.0, 0.0]]);
            }
            Command::Growth | Command::VcDim => {}
            Command::BoundsTable => {
                let b = self.bounds.get_or_insert(BoundsSpec {
                    m_grid: None,
                    d_v: None,
                    b: None,
                    relu_depth: None,
                    relu_params: None,
                });
                b.m_grid.get_or_insert_with(|| DEFAULT_M_GRID.to_vec());
                b.b.get_or_insert(1.0);
            }
        }
        let geometric = matches!(self.hypothesis, Some(HypothesisSpec::Halfspace | HypothesisSpec::Relu { .. }));
        if geometric || matches!(cmd, Command::Growth | Command::VcDim) {
            let m = self.domain_size();
            let c = self.class.get_or_insert(ClassSpec { k_max: None, relu_samples: None, relu_range: None, cap: None, d_v: None });
            c.relu_samples.get_or_insert(10_000);
            c.relu_range.get_or_insert(1.0);
            c.cap.get_or_insert(20);
            if cmd == Command::VcDim {
                c.k_max.get_or_insert(m.unwrap_or(10).min(10));
            }
        }
        let out = self.output.get_or_insert_with(OutputSpec::default);
        out.format.get_or_insert(Format::Both);
        self
    }

    /// Domain size when known without reading files.
    fn domain_size(&self) -> Option<usize> {
        match self.domain.as_ref()? {
            DomainSpec::Inline { points } => Some(points.len()),
            DomainSpec::Random { m, .. } | DomainSpec::Cube { m } => Some(*m),
            DomainSpec::File { .. } => None,
        }
    }
}
