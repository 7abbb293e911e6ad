//! Classifiers on a finite domain viewed as vertices of the Hamming cube
//! `{-1, +1}^m`, together with the distance functionals and the product
//! distributions they are drawn from.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::rng_from;

/// Identifier binding classifiers and distributions to one domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DomainId(pub u64);

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv_extend(mut h: u64, word: u64) -> u64 {
    for b in word.to_le_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

impl DomainId {
    /// Identifier of the bare cube `{-1,1}^m` with no geometry attached.
    pub fn cube(m: usize) -> Self {
        DomainId(fnv_extend(fnv_extend(FNV_OFFSET, 0x6375_6265), m as u64))
    }
}

/// Ordered finite point set `X = {x_1, ..., x_m}` in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainRepr", into = "DomainRepr")]
pub struct Domain {
    points: Vec<Vec<f64>>,
    dim: usize,
    id: DomainId,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainRepr {
    points: Vec<Vec<f64>>,
}

impl TryFrom<DomainRepr> for Domain {
    type Error = Error;
    fn try_from(r: DomainRepr) -> Result<Self> {
        Domain::new(r.points)
    }
}

impl From<Domain> for DomainRepr {
    fn from(d: Domain) -> Self {
        DomainRepr { points: d.points }
    }
}

impl Domain {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidDomain("domain needs at least one point".into()));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidDomain("points must have dimension >= 1".into()));
        }
        let mut seen = HashSet::with_capacity(points.len());
        let mut h = fnv_extend(FNV_OFFSET, dim as u64);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidDomain(format!(
                    "point {i} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidDomain(format!("point {i} has a non-finite coordinate")));
            }
            // +0.0 folds -0.0 into 0.0
            let key: Vec<u64> = p.iter().map(|c| (c + 0.0).to_bits()).collect();
            for &w in &key {
                h = fnv_extend(h, w);
            }
            if !seen.insert(key) {
                return Err(Error::InvalidDomain(format!("point {i} is a duplicate")));
            }
        }
        Ok(Domain { points, dim, id: DomainId(h) })
    }

    pub fn id(&self) -> DomainId {
        self.id
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    /// Sub-domain made of the given indices, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Domain> {
        let pts = indices
            .iter()
            .map(|&i| {
                self.points
                    .get(i)
                    .cloned()
                    .ok_or(Error::InvalidIndex { index: i, m: self.len() })
            })
            .collect::<Result<Vec<_>>>()?;
        Domain::new(pts)
    }
}

/// A labeling `X -> {-1, +1}` stored as a bitset (bit set means `+1`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Classifier {
    domain: DomainId,
    m: usize,
    words: Vec<u64>,
}

fn words_for(m: usize) -> usize {
    m.div_ceil(64)
}

impl Classifier {
    /// Builds a classifier from `±1` labels.
    pub fn from_signs(domain: DomainId, labels: &[i8]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidClassifier("empty label vector".into()));
        }
        let mut words = vec![0u64; words_for(labels.len())];
        for (i, &y) in labels.iter().enumerate() {
            match y {
                1 => words[i / 64] |= 1 << (i % 64),
                -1 => {}
                other => {
                    return Err(Error::InvalidClassifier(format!(
                        "label {other} at position {i} is not +-1"
                    )))
                }
            }
        }
        Ok(Classifier { domain, m: labels.len(), words })
    }

    /// Builds a classifier from `{0, 1}` outputs through `y -> 2y - 1`.
    pub fn from_zero_one(domain: DomainId, outputs: &[u8]) -> Result<Self> {
        let signs = outputs
            .iter()
            .enumerate()
            .map(|(i, &y)| match y {
                0 => Ok(-1),
                1 => Ok(1),
                other => Err(Error::InvalidClassifier(format!(
                    "output {other} at position {i} is not 0/1"
                ))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Self::from_signs(domain, &signs)
    }

    /// Builds a classifier on at most 64 points from a bit mask.
    pub fn from_mask(domain: DomainId, m: usize, mask: u64) -> Self {
        assert!((1..=64).contains(&m), "mask classifiers support 1..=64 points");
        let mask = if m == 64 { mask } else { mask & ((1u64 << m) - 1) };
        Classifier { domain, m, words: vec![mask] }
    }

    pub(crate) fn from_words(domain: DomainId, m: usize, mut words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(m));
        if m % 64 != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (m % 64)) - 1;
            }
        }
        Classifier { domain, m, words }
    }

    /// Constant classifier.
    pub fn constant(domain: DomainId, m: usize, sign: i8) -> Self {
        let w = if sign > 0 { u64::MAX } else { 0 };
        Self::from_words(domain, m, vec![w; words_for(m)])
    }

    /// Parses a `'+'`/`'-'` string.
    pub fn parse(domain: DomainId, s: &str) -> Result<Self> {
        let labels = s
            .trim()
            .chars()
            .enumerate()
            .map(|(i, c)| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(Error::Parse(format!("character {other:?} at {i} is not '+' or '-'"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Self::from_signs(domain, &labels)
    }

    pub fn domain(&self) -> DomainId {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> i8 {
        if self.words[i / 64] >> (i % 64) & 1 == 1 {
            1
        } else {
            -1
        }
    }

    pub fn labels(&self) -> Vec<i8> {
        (0..self.m).map(|i| self.get(i)).collect()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Bit mask of the `+1` positions when `m <= 64`.
    pub fn mask(&self) -> Option<u64> {
        (self.m <= 64).then(|| self.words[0])
    }

    pub fn negated(&self) -> Self {
        Self::from_words(self.domain, self.m, self.words.iter().map(|w| !w).collect())
    }

    /// Copy with coordinate `i` flipped.
    pub fn flipped(&self, i: usize) -> Self {
        let mut c = self.clone();
        c.words[i / 64] ^= 1 << (i % 64);
        c
    }

    /// Same labels re-bound to another domain of the same size.
    pub fn rebind(&self, domain: DomainId) -> Self {
        Classifier { domain, ..self.clone() }
    }

    /// Restriction to the given indices, bound to `domain`.
    pub fn restrict(&self, indices: &[usize], domain: DomainId) -> Result<Self> {
        let labels = indices
            .iter()
            .map(|&i| {
                if i < self.m {
                    Ok(self.get(i))
                } else {
                    Err(Error::InvalidIndex { index: i, m: self.m })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_signs(domain, &labels)
    }

    /// Number of positions where the two classifiers disagree.
    pub fn hamming(&self, other: &Classifier) -> Result<usize> {
        self.check_same(other)?;
        Ok(self.hamming_unchecked(other))
    }

    #[inline]
    pub(crate) fn hamming_unchecked(&self, other: &Classifier) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    fn check_same(&self, other: &Classifier) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        if self.m != other.m {
            return Err(Error::LengthMismatch { expected: self.m, got: other.m });
        }
        Ok(())
    }

    pub fn count_positive(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

impl fmt::Display for Classifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.m {
            f.write_str(if self.get(i) > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Classifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Classifier({self})")
    }
}

impl FromStr for Classifier {
    type Err = Error;
    /// Parses onto the bare cube of matching length.
    fn from_str(s: &str) -> Result<Self> {
        let m = s.trim().chars().count();
        Classifier::parse(DomainId::cube(m), s)
    }
}

/// `eta_h(f) = (1/m)·||f - h||²`, held as the rational `4k / m` where `k` is the
/// Hamming distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Eta {
    pub disagreements: usize,
    pub m: usize,
}

impl Eta {
    pub fn numerator(&self) -> u64 {
        4 * self.disagreements as u64
    }

    pub fn denominator(&self) -> u64 {
        self.m as u64
    }

    pub fn value(&self) -> f64 {
        self.numerator() as f64 / self.m as f64
    }
}

impl PartialOrd for Eta {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        let l = self.numerator() as u128 * other.denominator() as u128;
        let r = other.numerator() as u128 * self.denominator() as u128;
        Some(l.cmp(&r))
    }
}

/// `<f, h> / m`, held as the rational `(m - 2k) / m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NormalizedInner {
    pub numerator: i64,
    pub m: usize,
}

impl NormalizedInner {
    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.m as f64
    }
}

pub fn eta(f: &Classifier, h: &Classifier) -> Result<Eta> {
    let k = f.hamming(h)?;
    Ok(Eta { disagreements: k, m: f.len() })
}

pub fn normalized_inner(f: &Classifier, h: &Classifier) -> Result<NormalizedInner> {
    let k = f.hamming(h)?;
    Ok(NormalizedInner { numerator: f.len() as i64 - 2 * k as i64, m: f.len() })
}

/// Product law on `{-1,1}^m` with `probs[i] = P(f(x_i) = +1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductDistribution {
    domain: DomainId,
    probs: Vec<f64>,
    uniform: bool,
}

impl ProductDistribution {
    pub fn new(domain: DomainId, probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no coordinates".into()));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidProbability { index: i, value: p });
            }
        }
        let uniform = probs.iter().all(|&p| p == 0.5);
        Ok(ProductDistribution { domain, probs, uniform })
    }

    pub fn uniform(domain: DomainId, m: usize) -> Result<Self> {
        Self::new(domain, vec![0.5; m])
    }

    /// Each coordinate agrees with `center` with probability `1 - flip`.
    pub fn concentrated(center: &Classifier, flip: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&flip) {
            return Err(Error::InvalidProbability { index: 0, value: flip });
        }
        let probs = (0..center.len())
            .map(|i| if center.get(i) > 0 { 1.0 - flip } else { flip })
            .collect();
        Self::new(center.domain(), probs)
    }

    pub fn domain(&self) -> DomainId {
        self.domain
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    /// Probability of one labeling under the product law.
    pub fn weight(&self, f: &Classifier) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| if f.get(i) > 0 { p } else { 1.0 - p })
            .product()
    }

    fn check(&self, h: &Classifier) -> Result<()> {
        if h.domain() != self.domain {
            return Err(Error::DomainMismatch);
        }
        if h.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: h.len() });
        }
        Ok(())
    }
}

/// Serialized form of a domain together with a product distribution on it.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionFile {
    pub points: Vec<Vec<f64>>,
    pub probs: Vec<f64>,
}

impl DistributionFile {
    pub fn from_parts(domain: &Domain, dist: &ProductDistribution) -> Self {
        DistributionFile { points: domain.points().to_vec(), probs: dist.probs().to_vec() }
    }

    pub fn into_parts(self) -> Result<(Domain, ProductDistribution)> {
        let domain = Domain::new(self.points)?;
        if self.probs.len() != domain.len() {
            return Err(Error::LengthMismatch { expected: domain.len(), got: self.probs.len() });
        }
        let dist = ProductDistribution::new(domain.id(), self.probs)?;
        Ok((domain, dist))
    }
}

/// `mu_h = E eta_h` in closed form: `(4/m) Σ q_i` with `q_i = P(f(x_i) != h(x_i))`.
pub fn mean_eta(h: &Classifier, p: &ProductDistribution) -> Result<f64> {
    p.check(h)?;
    let q: f64 = p
        .probs
        .iter()
        .enumerate()
        .map(|(i, &pi)| if h.get(i) > 0 { 1.0 - pi } else { pi })
        .sum();
    Ok(4.0 * q / h.len() as f64)
}

/// `mu_{H(X)} = min_h mu_h` with the first minimizing index.
pub fn mu_class(class: &[Classifier], p: &ProductDistribution) -> Result<(f64, usize)> {
    if class.is_empty() {
        return Err(Error::EmptyClass);
    }
    let mut best = (f64::INFINITY, 0);
    for (i, h) in class.iter().enumerate() {
        let mu = mean_eta(h, p)?;
        if mu < best.0 {
            best = (mu, i);
        }
    }
    Ok(best)
}

/// Squared normalized distance from `f` to the class, with the first nearest index.
pub fn distance_sq_to_class(f: &Classifier, class: &[Classifier]) -> Result<(Eta, usize)> {
    if class.is_empty() {
        return Err(Error::EmptyClass);
    }
    let mut best: Option<(usize, usize)> = None;
    for (i, h) in class.iter().enumerate() {
        let k = f.hamming(h)?;
        if best.is_none_or(|(bk, _)| k < bk) {
            best = Some((k, i));
        }
    }
    let (k, i) = best.expect("nonempty class");
    Ok((Eta { disagreements: k, m: f.len() }, i))
}

/// Draws `f` with independent coordinates, `f_i = +1` with probability `p_i`.
pub fn sample_classifier(p: &ProductDistribution, seed: u64) -> Classifier {
    let mut rng = rng_from(seed);
    let m = p.len();
    let mut words = vec![0u64; words_for(m)];
    if p.uniform {
        for w in words.iter_mut() {
            *w = rng.random::<u64>();
        }
    } else {
        for (i, &pi) in p.probs.iter().enumerate() {
            let u: f64 = rng.random();
            if u < pi {
                words[i / 64] |= 1 << (i % 64);
            }
        }
    }
    Classifier::from_words(p.domain, m, words)
}
