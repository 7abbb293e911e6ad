//! Full-enumeration oracles for the closed forms and the Monte Carlo experiments.
//!
//! The oracles here work on plain `Vec<i8>` labelings and never call the
//! library's distance or error routines, so agreement is meaningful.

use finvc::classes::{cover_count, enumerate_halfspace_dichotomies};
use finvc::concentration::{
    approx_concentration_experiment, bd_flip_check_empirical_exhaustive, bd_flip_check_eta_exhaustive,
    uniform_convergence_experiment, BoundKind,
};
use finvc::seed::{derive_seed, rng_from};
use finvc::{mean_eta, mu_class, Classifier, DomainId, LabelLaw, LossFunction, PointSet, ProductDistribution};
use finvc::{true_error, SamplingDistribution};
use rand::Rng;

fn random_labels(rng: &mut impl Rng, m: usize) -> Vec<i8> {
    (0..m).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect()
}

fn labels_of(mask: u64, m: usize) -> Vec<i8> {
    (0..m).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect()
}

fn weight(f: &[i8], p: &[f64]) -> f64 {
    f.iter().zip(p).map(|(&y, &pi)| if y > 0 { pi } else { 1.0 - pi }).product()
}

fn eta_oracle(f: &[i8], h: &[i8]) -> f64 {
    let sq: i32 = f.iter().zip(h).map(|(&a, &b)| ((a - b) as i32).pow(2)).sum();
    sq as f64 / f.len() as f64
}

fn within_3_sigma(freq: f64, p: f64, trials: usize) -> bool {
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    (freq - p).abs() <= 3.0 * sigma + 1e-12
}

#[test]
fn closed_form_means_match_enumeration() {
    let mut rng = rng_from(101);
    for m in 1..=10 {
        let domain = DomainId::cube(m);
        let probs: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
        let p = ProductDistribution::new(domain, probs.clone()).unwrap();
        let size = rng.random_range(1..=8);
        let hs: Vec<Vec<i8>> = (0..size).map(|_| random_labels(&mut rng, m)).collect();
        let class: Vec<Classifier> = hs.iter().map(|h| Classifier::from_signs(domain, h).unwrap()).collect();
        let mut oracle_means = vec![0.0; size];
        for mask in 0..1u64 << m {
            let f = labels_of(mask, m);
            let w = weight(&f, &probs);
            for (j, h) in hs.iter().enumerate() {
                oracle_means[j] += w * eta_oracle(&f, h);
            }
        }
        for (h, &want) in class.iter().zip(&oracle_means) {
            assert!((mean_eta(h, &p).unwrap() - want).abs() < 1e-12, "m = {m}");
        }
        let want_mu = oracle_means.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((mu_class(&class, &p).unwrap().0 - want_mu).abs() < 1e-12);
    }
}

#[test]
fn approximation_events_match_enumeration() {
    let trials = 20_000;
    let lambdas = [0.05, 0.1, 0.2, 0.4, 0.8];
    let mut rng = rng_from(202);
    for m in [2usize, 5, 8, 10] {
        let domain = DomainId::cube(m);
        let probs: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
        let p = ProductDistribution::new(domain, probs.clone()).unwrap();
        let size = rng.random_range(1..=8);
        let hs: Vec<Vec<i8>> = (0..size).map(|_| random_labels(&mut rng, m)).collect();
        let class: Vec<Classifier> = hs.iter().map(|h| Classifier::from_signs(domain, h).unwrap()).collect();
        let report = approx_concentration_experiment(&class, &p, &lambdas, trials, 77 + m as u64).unwrap();
        let mu = report.mu_used.unwrap();
        for r in 0..report.rows() {
            let lambda = report.lambda_grid[r];
            let mut prob = 0.0;
            for mask in 0..1u64 << m {
                let f = labels_of(mask, m);
                let d = hs.iter().map(|h| eta_oracle(&f, h)).fold(f64::INFINITY, f64::min);
                let hit = match report.event[r] {
                    BoundKind::Thm2Lower => d >= mu - lambda,
                    BoundKind::Thm2Upper => d <= mu + lambda,
                    _ => unreachable!(),
                };
                if hit {
                    prob += weight(&f, &probs);
                }
            }
            assert!(
                within_3_sigma(report.empirical_freq[r], prob, trials),
                "m = {m}, row {r}: freq {} vs exact {prob}",
                report.empirical_freq[r]
            );
        }
    }
}

#[test]
fn uniform_convergence_matches_enumeration() {
    // m = 4, |H| = 2, n = 3: all (4 · 2)^3 samples weighted by their probability.
    let m = 4;
    let n = 3;
    let domain = DomainId::cube(m);
    let x_weights = vec![0.1, 0.2, 0.3, 0.4];
    let label_p = vec![0.9, 0.2, 0.6, 0.5];
    let dist = SamplingDistribution::new(domain, x_weights.clone(), LabelLaw::PerPoint(label_p.clone())).unwrap();
    let hs = [vec![1i8, -1, 1, -1], vec![1, 1, -1, -1]];
    let class: Vec<Classifier> = hs.iter().map(|h| Classifier::from_signs(domain, h).unwrap()).collect();
    let loss = LossFunction::zero_one();
    let trials = 10_000;
    let report = uniform_convergence_experiment(&class, &dist, &loss, &[n], &[0.1, 0.3, 0.5], trials, 31).unwrap();

    // True errors by hand: 0-1 loss is P(y != h(x)).
    let truth: Vec<f64> = hs
        .iter()
        .map(|h| (0..m).map(|i| x_weights[i] * if h[i] > 0 { 1.0 - label_p[i] } else { label_p[i] }).sum())
        .collect();
    for (h, &t) in class.iter().zip(&truth) {
        assert!((true_error(h, &dist, &loss).unwrap() - t).abs() < 1e-15);
    }

    let pairs: Vec<(usize, i8, f64)> = (0..m)
        .flat_map(|i| [(i, 1i8, x_weights[i] * label_p[i]), (i, -1, x_weights[i] * (1.0 - label_p[i]))])
        .collect();
    let mut sups = Vec::new();
    for a in &pairs {
        for b in &pairs {
            for c in &pairs {
                let s = [a, b, c];
                let w: f64 = s.iter().map(|p| p.2).product();
                let sup = hs
                    .iter()
                    .zip(&truth)
                    .map(|(h, &t)| {
                        let wrong = s.iter().filter(|p| h[p.0] != p.1).count();
                        (wrong as f64 / n as f64 - t).abs()
                    })
                    .fold(0.0, f64::max);
                sups.push((sup, w));
            }
        }
    }
    assert_eq!(sups.len(), 512);
    assert!((sups.iter().map(|s| s.1).sum::<f64>() - 1.0).abs() < 1e-12);
    for r in 0..report.rows() {
        let lambda = report.lambda_grid[r];
        let prob: f64 = sups.iter().filter(|s| s.0 <= lambda).map(|s| s.1).sum();
        assert!(within_3_sigma(report.empirical_freq[r], prob, trials), "lambda {lambda}");
    }
}

#[test]
fn eta_flip_difference_is_exact_for_every_function() {
    let mut rng = rng_from(303);
    for m in 1..=10 {
        let h = Classifier::from_signs(DomainId::cube(m), &random_labels(&mut rng, m)).unwrap();
        let r = bd_flip_check_eta_exhaustive(&h).unwrap();
        assert!(r.exact, "m = {m}");
        assert!(r.observed_max.iter().chain(&r.observed_min).all(|&d| d == 4.0 / m as f64));
        assert_eq!(r.evaluations, (1u64 << m) * m as u64);
    }
}

#[test]
fn empirical_replacement_exhaustive() {
    let h = Classifier::parse(DomainId::cube(2), "+-").unwrap();
    let r = bd_flip_check_empirical_exhaustive(&h, &LossFunction::zero_one(), 3).unwrap();
    assert!((r.max_observed() - 1.0 / 3.0).abs() < 1e-15);
    assert!(r.claimed.iter().all(|&c| c == 2.0 / 3.0));
    assert!(r.within_claim());
}

#[test]
fn halfspace_counts_match_cover_formula() {
    let mut checked = 0;
    for d in 1..=3usize {
        for m in 1..=10usize {
            let pts = PointSet::random_normal(m, d, derive_seed(404, (d * 100 + m) as u64), 100).unwrap();
            assert!(pts.general_position());
            let set = enumerate_halfspace_dichotomies(&pts).unwrap();
            assert_eq!(Some(set.len() as u64), num_traits::ToPrimitive::to_u64(&cover_count(m as u64, d as u64 + 1).unwrap()));
            let refs = pts.point_refs();
            for dich in &set.dichotomies {
                assert!(dich.witness.verify(&refs, &dich.labeling.labels()));
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 30);
}
