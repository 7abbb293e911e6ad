//! Dispatch from a resolved config to the core routines, and output writing.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use finvc::classes::{
    bartlett_bound, enumerate_halfspace_dichotomies_with, growth_record, sample_relu_labelings, sauer_shelah_bound,
    vc_dimension_search, vc_polynomial_bound, GrowthOptions, HalfspaceOptions, HypothesisClass, ReluArch, VcOptions,
};
use finvc::concentration::{
    approx_concentration_experiment, bd_flip_check_empirical, bd_flip_check_empirical_exhaustive, bd_flip_check_eta,
    bd_flip_check_eta_exhaustive, fnum, thm2_bounds_ln, thm3_bound_ln, uniform_convergence_experiment, BdReport,
};
use finvc::seed::{derive_seed, derive_seed2};
use finvc::{
    sample_classifier, Classifier, DomainId, LabelLaw, LossFunction, PointSet, ProductDistribution,
    SamplingDistribution,
};

use crate::config::{
    BdFunctionalChoice, Command, DistributionSpec, DomainSpec, ExperimentConfig, HypothesisSpec, SamplingSpec,
};
use crate::error::CliError;

pub const REPORT_FILE: &str = "report.json";
pub const CURVES_FILE: &str = "curves.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub resolved_config: ExperimentConfig,
    pub tool: String,
    pub version: String,
    pub duration_secs: f64,
    pub violated: bool,
    /// File name to SHA-256 hex digest.
    pub outputs: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub manifest: Manifest,
    pub manifest_path: PathBuf,
    pub violated: bool,
    pub summary: String,
}

/// Report text and plot data produced by one command.
struct Artifacts {
    json: String,
    csv: String,
    violated: bool,
    summary: String,
}

fn time_seed() -> u64 {
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    derive_seed(nanos, std::process::id() as u64)
}

/// Validates, resolves defaults, runs and writes all outputs into `out_dir`.
pub fn run(config: ExperimentConfig, out_dir: &Path) -> Result<RunOutput, CliError> {
    let diags = config.validate();
    if !diags.is_empty() {
        return Err(CliError::Config(diags));
    }
    let cfg = config.resolve(time_seed);
    let start = Instant::now();
    let art = execute(&cfg)?;
    let elapsed = start.elapsed().as_secs_f64();

    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Input(format!("{}: {e}", out_dir.display())))?;
    let mut outputs = BTreeMap::new();
    let format = cfg.format();
    if format.json() {
        outputs.insert(REPORT_FILE.to_string(), write(out_dir, REPORT_FILE, &art.json)?);
    }
    if format.csv() {
        outputs.insert(CURVES_FILE.to_string(), write(out_dir, CURVES_FILE, &art.csv)?);
    }
    let manifest = Manifest {
        resolved_config: cfg,
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        duration_secs: elapsed,
        violated: art.violated,
        outputs,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(anyhow::Error::from)? + "\n";
    write(out_dir, MANIFEST_FILE, &text)?;
    Ok(RunOutput { manifest, manifest_path: out_dir.join(MANIFEST_FILE), violated: art.violated, summary: art.summary })
}

fn write(dir: &Path, name: &str, text: &str) -> Result<String, CliError> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(text.as_bytes())))
}

/// SHA-256 hex digest of a file.
pub fn file_digest(path: &Path) -> std::io::Result<String> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value).map_err(anyhow::Error::from)? + "\n")
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn fopt(x: Option<f64>) -> String {
    x.map(fnum).unwrap_or_default()
}

fn execute(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let seed = cfg.seed.expect("resolved");
    match cfg.command.expect("resolved") {
        Command::Growth => growth(cfg),
        Command::VcDim => vc_dim(cfg, seed),
        Command::ApproxConcentration => approx(cfg, seed),
        Command::UniformConvergence => uniform(cfg, seed),
        Command::BdCheck => bd_check(cfg, seed),
        Command::BoundsTable => bounds_table(cfg),
    }
}

/// A domain: its identity, size, and coordinates when it has them.
pub struct LoadedDomain {
    pub id: DomainId,
    pub m: usize,
    pub points: PointSet,
    pub has_coordinates: bool,
}

pub fn load_domain(spec: &DomainSpec) -> Result<LoadedDomain, CliError> {
    let (points, has_coordinates) = match spec {
        DomainSpec::Inline { points } => (PointSet::from_points(points.clone())?, true),
        DomainSpec::File { path } => {
            let pts = if path.extension().is_some_and(|e| e == "json") {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                PointSet::from_json_str(&text)?
            } else {
                PointSet::from_csv_path(path)?
            };
            (pts, true)
        }
        DomainSpec::Random { m, d, seed, max_retries } => {
            (PointSet::random_normal(*m, *d, seed.expect("resolved"), max_retries.unwrap_or(100))?, true)
        }
        DomainSpec::Cube { m } => {
            // Placeholder coordinates so explicit lists can reuse point-based routines.
            let pts = PointSet::from_points((0..*m).map(|i| vec![i as f64]).collect())?;
            return Ok(LoadedDomain { id: DomainId::cube(*m), m: *m, points: pts, has_coordinates: false });
        }
    };
    Ok(LoadedDomain { id: points.id(), m: points.len(), points, has_coordinates })
}

fn read_classifier_file(path: &Path) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e == "json") {
        return serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())));
    }
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

/// The class as a core object plus, where finite, its labelings on the domain.
pub fn load_class(cfg: &ExperimentConfig, dom: &LoadedDomain) -> Result<(HypothesisClass, Vec<Classifier>), CliError> {
    let seed = cfg.seed.unwrap_or(0);
    let class_opts = cfg.class.as_ref();
    match cfg.hypothesis.as_ref().expect("validated") {
        HypothesisSpec::Explicit { classifiers, path } => {
            let strings = match (classifiers, path) {
                (Some(list), _) => list.clone(),
                (None, Some(p)) => read_classifier_file(p)?,
                (None, None) => Vec::new(),
            };
            if strings.is_empty() {
                return Err(CliError::config(vec![crate::error::Diagnostic::new("hypothesis", "hypothesis class empty")]));
            }
            let list = strings
                .iter()
                .map(|s| {
                    if s.len() != dom.m {
                        return Err(CliError::Input(format!("classifier {s} has length {}, domain has {}", s.len(), dom.m)));
                    }
                    Ok(Classifier::parse(dom.id, s)?)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok((HypothesisClass::explicit(list.clone())?, list))
        }
        HypothesisSpec::Random { count, seed: s } => {
            let p = ProductDistribution::uniform(dom.id, dom.m)?;
            let base = s.unwrap_or(seed);
            let list: Vec<Classifier> = (0..*count).map(|i| sample_classifier(&p, derive_seed(base, i as u64))).collect();
            Ok((HypothesisClass::explicit(list.clone())?, list))
        }
        HypothesisSpec::Halfspace => {
            let class = HypothesisClass::AffineHalfspace { dim: dom.points.dim() };
            let opts = HalfspaceOptions { cap: class_opts.and_then(|c| c.cap).unwrap_or(20), ..Default::default() };
            let list = if dom.m <= opts.cap {
                enumerate_halfspace_dichotomies_with(&dom.points, &opts)?.dichotomies.into_iter().map(|d| d.labeling).collect()
            } else {
                Vec::new()
            };
            Ok((class, list))
        }
        HypothesisSpec::Relu { hidden } => {
            let arch = ReluArch::new(dom.points.dim(), hidden.clone())?;
            let samples = class_opts.and_then(|c| c.relu_samples).unwrap_or(10_000);
            let range = class_opts.and_then(|c| c.relu_range).unwrap_or(1.0);
            let list = sample_relu_labelings(&arch, &dom.points, samples, derive_seed(seed, 3), range)?
                .into_iter()
                .collect();
            Ok((HypothesisClass::ReluNetwork(arch), list))
        }
    }
}

fn growth(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let dom = load_domain(cfg.domain.as_ref().expect("validated"))?;
    let (class, _) = load_class(cfg, &dom)?;
    let c = cfg.class.as_ref().expect("resolved");
    let opts = GrowthOptions {
        halfspace: HalfspaceOptions { cap: c.cap.unwrap_or(20), ..Default::default() },
        relu_samples: c.relu_samples.unwrap_or(10_000),
        relu_range: c.relu_range.unwrap_or(1.0),
        seed: derive_seed(cfg.seed.expect("resolved"), 3),
        d_v: c.d_v,
    };
    let record = growth_record(&class, &dom.points, &opts)?;
    let consistent = record.is_consistent();
    #[derive(Serialize)]
    struct GrowthReport<'a> {
        kind: &'static str,
        general_position: bool,
        consistent: bool,
        record: &'a finvc::classes::GrowthRecord,
    }
    let json = to_json(&GrowthReport {
        kind: "growth",
        general_position: dom.points.general_position(),
        consistent,
        record: &record,
    })?;
    let b = &record.bounds;
    let csv = csv_text(
        &[
            "class",
            "m",
            "count",
            "lower_bound",
            "method",
            "d_v",
            "growth_function_exact",
            "cover_count",
            "vc_poly",
            "sauer_shelah_sum",
            "sauer_shelah_env",
            "bartlett_log",
        ],
        &[vec![
            record.class.clone(),
            record.m.to_string(),
            opt(record.count),
            opt(record.lower_bound),
            serde_json::to_value(record.method).map_err(anyhow::Error::from)?.as_str().unwrap_or_default().to_string(),
            opt(record.d_v),
            record.growth_function_exact.to_string(),
            opt(record.cover_count.as_ref()),
            opt(b.vc_poly.as_ref()),
            opt(b.sauer_shelah_sum.as_ref()),
            fopt(b.sauer_shelah_env),
            fopt(b.bartlett_log),
        ]],
    );
    let summary = format!("{}: {} labelings on m = {}", record.class, record.value(), record.m);
    Ok(Artifacts { json, csv, violated: !consistent, summary })
}

fn vc_dim(cfg: &ExperimentConfig, seed: u64) -> Result<Artifacts, CliError> {
    let dom = load_domain(cfg.domain.as_ref().expect("validated"))?;
    let (class, _) = load_class(cfg, &dom)?;
    let c = cfg.class.as_ref().expect("resolved");
    let k_max = c.k_max.unwrap_or(10).min(dom.m);
    let opts = VcOptions {
        relu_samples: c.relu_samples.unwrap_or(10_000),
        relu_range: c.relu_range.unwrap_or(1.0),
        seed: derive_seed(seed, 5),
    };
    let vc = vc_dimension_search(&class, &dom.points, k_max, &opts)?;
    let lower_only = matches!(class, HypothesisClass::ReluNetwork(_));
    #[derive(Serialize)]
    struct VcReport {
        kind: &'static str,
        class: &'static str,
        pool_size: usize,
        dim: usize,
        k_max: usize,
        vc_dimension: usize,
        lower_bound_only: bool,
    }
    let report = VcReport {
        kind: "vc-dim",
        class: class.name(),
        pool_size: dom.m,
        dim: dom.points.dim(),
        k_max,
        vc_dimension: vc,
        lower_bound_only: lower_only,
    };
    let csv = csv_text(
        &["class", "pool_size", "dim", "k_max", "vc_dimension", "lower_bound_only"],
        &[vec![
            report.class.to_string(),
            report.pool_size.to_string(),
            report.dim.to_string(),
            k_max.to_string(),
            vc.to_string(),
            lower_only.to_string(),
        ]],
    );
    let summary = format!("{}: largest shattered subset of the pool has size {vc}", class.name());
    Ok(Artifacts { json: to_json(&report)?, csv, violated: false, summary })
}

fn class_list(cfg: &ExperimentConfig, dom: &LoadedDomain) -> Result<Vec<Classifier>, CliError> {
    let (_, list) = load_class(cfg, dom)?;
    if list.is_empty() {
        return Err(CliError::Input("the class has no enumerable labelings on this domain".into()));
    }
    Ok(list)
}

fn product_distribution(cfg: &ExperimentConfig, dom: &LoadedDomain, list: &[Classifier]) -> Result<ProductDistribution, CliError> {
    Ok(match cfg.distribution.as_ref().unwrap_or(&DistributionSpec::Uniform) {
        DistributionSpec::Uniform => ProductDistribution::uniform(dom.id, dom.m)?,
        DistributionSpec::Probs { probs } => ProductDistribution::new(dom.id, probs.clone())?,
        DistributionSpec::Concentrated { center, center_index, flip } => {
            let c = match (center, center_index) {
                (Some(s), _) => Classifier::parse(dom.id, s)?,
                (None, Some(i)) => list
                    .get(*i)
                    .cloned()
                    .ok_or_else(|| CliError::Input(format!("center_index {i} out of range")))?,
                (None, None) => unreachable!("validated"),
            };
            ProductDistribution::concentrated(&c, *flip)?
        }
    })
}

fn approx(cfg: &ExperimentConfig, seed: u64) -> Result<Artifacts, CliError> {
    let dom = load_domain(cfg.domain.as_ref().expect("validated"))?;
    let list = class_list(cfg, &dom)?;
    let p = product_distribution(cfg, &dom, &list)?;
    let grid = cfg.lambda_grid.as_deref().expect("resolved");
    let report = approx_concentration_experiment(&list, &p, grid, cfg.trials.expect("resolved"), seed)?;
    let d = report.distance.as_ref().expect("approx report has a distance summary");
    let summary = format!(
        "mu = {}, mean dist^2 = {}, violations: {}",
        report.mu_used.unwrap_or(f64::NAN),
        d.mean,
        report.violated.iter().filter(|&&v| v).count()
    );
    Ok(Artifacts { json: report.to_json()? + "\n", csv: report.to_csv()?, violated: report.any_violation(), summary })
}

fn sampling_distribution(spec: &SamplingSpec, dom: &LoadedDomain) -> Result<(SamplingDistribution, LossFunction), CliError> {
    let weights = spec.x_weights.clone().unwrap_or_else(|| vec![1.0 / dom.m as f64; dom.m]);
    let law = match (&spec.label_probs, spec.p0) {
        (Some(lp), _) => LabelLaw::PerPoint(lp.clone()),
        (None, Some(p)) => LabelLaw::Iid(p),
        (None, None) => LabelLaw::Iid(0.5),
    };
    let dist = if spec.x_weights.is_none() {
        match law {
            LabelLaw::Iid(p) => SamplingDistribution::uniform(dom.id, dom.m, p)?,
            law => SamplingDistribution::new(dom.id, weights, law)?,
        }
    } else {
        SamplingDistribution::new(dom.id, weights, law)?
    };
    let loss = match spec.loss {
        Some(t) => LossFunction::new(t)?,
        None => LossFunction::zero_one(),
    };
    Ok((dist, loss))
}

fn uniform(cfg: &ExperimentConfig, seed: u64) -> Result<Artifacts, CliError> {
    let dom = load_domain(cfg.domain.as_ref().expect("validated"))?;
    let list = class_list(cfg, &dom)?;
    let (dist, loss) = sampling_distribution(cfg.sampling.as_ref().expect("resolved"), &dom)?;
    let report = uniform_convergence_experiment(
        &list,
        &dist,
        &loss,
        cfg.n_grid.as_deref().expect("resolved"),
        cfg.lambda_grid.as_deref().expect("resolved"),
        cfg.trials.expect("resolved"),
        seed,
    )?;
    let dev = report.deviation.as_ref().expect("uniform report has a deviation summary");
    let summary = format!(
        "median sup-deviation {:?} over n = {:?}, violations: {}",
        dev.median_sup_deviation,
        dev.n,
        report.violated.iter().filter(|&&v| v).count()
    );
    Ok(Artifacts { json: report.to_json()? + "\n", csv: report.to_csv()?, violated: report.any_violation(), summary })
}

#[derive(Serialize)]
struct BdEntry {
    classifier: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta: Option<BdReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    empirical: Option<BdReport>,
}

#[derive(Serialize)]
struct BdCheckReport {
    kind: &'static str,
    seed: u64,
    trials: u64,
    exhaustive: bool,
    n: usize,
    violated: bool,
    reports: Vec<BdEntry>,
}

fn bd_check(cfg: &ExperimentConfig, seed: u64) -> Result<Artifacts, CliError> {
    let dom = load_domain(cfg.domain.as_ref().expect("validated"))?;
    let list = class_list(cfg, &dom)?;
    let bd = cfg.bd.as_ref().expect("resolved");
    let which = bd.functional.unwrap_or(BdFunctionalChoice::Both);
    let exhaustive = bd.exhaustive.unwrap_or(false);
    let n = bd.n.unwrap_or(3);
    let trials = cfg.trials.expect("resolved");
    let (dist, loss) = sampling_distribution(cfg.sampling.as_ref().expect("resolved"), &dom)?;
    let mut entries = Vec::new();
    let mut violated = false;
    let mut rows = Vec::new();
    for (i, h) in list.iter().enumerate() {
        let eta = if which != BdFunctionalChoice::Empirical {
            let r = if exhaustive {
                bd_flip_check_eta_exhaustive(h)?
            } else {
                bd_flip_check_eta(h, trials, derive_seed2(seed, 0, i as u64))?
            };
            violated |= !(r.exact && r.within_claim());
            Some(r)
        } else {
            None
        };
        let empirical = if which != BdFunctionalChoice::Eta {
            let r = if exhaustive {
                bd_flip_check_empirical_exhaustive(h, &loss, n)?
            } else {
                bd_flip_check_empirical(h, &dist, &loss, n, trials, derive_seed2(seed, 1, i as u64))?
            };
            violated |= !r.within_claim();
            Some(r)
        } else {
            None
        };
        for r in eta.iter().chain(&empirical) {
            let functional = serde_json::to_value(r.functional).map_err(anyhow::Error::from)?;
            for j in 0..r.observed_max.len() {
                rows.push(vec![
                    i.to_string(),
                    functional.as_str().unwrap_or_default().to_string(),
                    j.to_string(),
                    fnum(r.observed_max[j]),
                    fnum(r.observed_min[j]),
                    fnum(r.claimed[j]),
                    fnum(r.slack[j]),
                ]);
            }
        }
        entries.push(BdEntry { classifier: h.to_string(), eta, empirical });
    }
    let report = BdCheckReport { kind: "bd-check", seed, trials: trials as u64, exhaustive, n, violated, reports: entries };
    let csv = csv_text(&["classifier", "functional", "coordinate", "observed_max", "observed_min", "claimed", "slack"], &rows);
    let summary = format!("{} classifiers checked, claim {}", list.len(), if violated { "VIOLATED" } else { "holds" });
    Ok(Artifacts { json: to_json(&report)?, csv, violated, summary })
}

#[derive(Serialize)]
struct BoundsRow {
    m: u64,
    #[serde(serialize_with = "ser_opt_string")]
    vc_poly: Option<String>,
    #[serde(serialize_with = "ser_opt_string")]
    sauer_shelah_sum: Option<String>,
    sauer_shelah_env: Option<f64>,
    ln_sauer_shelah_env: Option<f64>,
    bartlett_log: Option<f64>,
    /// `m^{-1/4}`.
    lambda: f64,
    /// Natural log of the growth value used below.
    ln_growth: f64,
    thm2_lower: f64,
    thm2_upper: f64,
    thm3_printed: f64,
    thm3_derived: f64,
    /// `ln(growth) - sqrt(m)/8`.
    log_decay: f64,
    /// `growth · e^{-sqrt(m)/8}`.
    decay: f64,
}

fn ser_opt_string<S: serde::Serializer>(x: &Option<String>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(v),
        None => s.serialize_none(),
    }
}

#[derive(Serialize)]
struct BoundsTable {
    kind: &'static str,
    d_v: u64,
    b: f64,
    relu_depth: Option<u64>,
    relu_params: Option<u64>,
    /// `"sauer-shelah-envelope"`, or `"2^m"` on rows with `m <= d_v`.
    growth_source: Vec<&'static str>,
    decay_monotone: bool,
    rows: Vec<BoundsRow>,
}

fn bounds_table(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let spec = cfg.bounds.as_ref().expect("resolved");
    let d_v = spec.d_v.expect("validated");
    let b = spec.b.unwrap_or(1.0);
    let relu = spec.relu_depth.zip(spec.relu_params);
    let mut rows = Vec::new();
    let mut sources = Vec::new();
    for &m in spec.m_grid.as_deref().expect("resolved") {
        let vc_poly = vc_polynomial_bound(m, d_v).ok().map(|x| x.to_string());
        let ss = if d_v >= 1 { sauer_shelah_bound(m, d_v).ok() } else { None };
        let bartlett_log = relu.and_then(|(l, w)| bartlett_bound(m, l, w).ok()).map(|x| x.log);
        let (ln_growth, source) = match &ss {
            Some(s) => (s.ln_envelope, "sauer-shelah-envelope"),
            None => (m as f64 * std::f64::consts::LN_2, "2^m"),
        };
        let lambda = (m as f64).powf(-0.25);
        let t2 = thm2_bounds_ln(m as usize, lambda, ln_growth)?;
        let t3 = thm3_bound_ln(m as usize, lambda, b, ln_growth)?;
        let log_decay = ln_growth - (m as f64).sqrt() / 8.0;
        sources.push(source);
        rows.push(BoundsRow {
            m,
            vc_poly,
            sauer_shelah_sum: ss.as_ref().map(|s| s.sum.to_string()),
            sauer_shelah_env: ss.as_ref().map(|s| s.envelope),
            ln_sauer_shelah_env: ss.as_ref().map(|s| s.ln_envelope),
            bartlett_log,
            lambda,
            ln_growth,
            thm2_lower: t2.lower,
            thm2_upper: t2.upper,
            thm3_printed: t3.printed,
            thm3_derived: t3.derived,
            log_decay,
            decay: log_decay.exp(),
        });
    }
    let decay_monotone = rows.windows(2).all(|w| w[1].log_decay < w[0].log_decay);
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.m.to_string(),
                d_v.to_string(),
                opt(r.vc_poly.as_ref()),
                opt(r.sauer_shelah_sum.as_ref()),
                fopt(r.sauer_shelah_env),
                fopt(r.ln_sauer_shelah_env),
                fopt(r.bartlett_log),
                fnum(r.lambda),
                fnum(r.ln_growth),
                fnum(r.thm2_lower),
                fnum(r.thm2_upper),
                fnum(r.thm3_printed),
                fnum(r.thm3_derived),
                fnum(r.log_decay),
                fnum(r.decay),
            ]
        })
        .collect();
    let csv = csv_text(
        &[
            "m",
            "d_v",
            "vc_poly",
            "sauer_shelah_sum",
            "sauer_shelah_env",
            "ln_sauer_shelah_env",
            "bartlett_log",
            "lambda",
            "ln_growth",
            "thm2_lower",
            "thm2_upper",
            "thm3_printed",
            "thm3_derived",
            "log_decay",
            "decay",
        ],
        &csv_rows,
    );
    let summary = format!("{} rows, decay monotone: {decay_monotone}", rows.len());
    let table = BoundsTable {
        kind: "bounds-table",
        d_v,
        b,
        relu_depth: spec.relu_depth,
        relu_params: spec.relu_params,
        growth_source: sources,
        decay_monotone,
        rows,
    };
    Ok(Artifacts { json: to_json(&table)?, csv, violated: false, summary })
}
