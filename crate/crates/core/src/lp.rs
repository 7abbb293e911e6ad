//! Strict linear separability of a labeled point set.
//!
//! A labeling `y` of points `x_i ∈ R^d` is strictly separable iff some
//! `w = (v, b)` satisfies `y_i (v·x_i + b) >= 1` for all `i`. By Gordan's
//! alternative exactly one of the following holds:
//!
//! * a witness `w` with `A w >= 1`, where row `i` of `A` is `y_i (x_i, 1)`;
//! * a certificate `u >= 0`, `Σ u_i = 1`, `Aᵀ u = 0`.
//!
//! The solver runs phase 1 of the simplex method on the certificate system
//! (only `d + 2` rows). If the phase-1 optimum is zero the basic solution is
//! the certificate; otherwise the optimal dual `(π, t)` has `t > 0` and
//! `A(-π/t) >= 1`, which is the witness. Either answer is re-verified before
//! it is returned.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arithmetic needed by the tableau.
pub trait LpScalar: Clone + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn is_zero(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn lt(&self, o: &Self) -> bool;
}

impl LpScalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite coordinate")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
}

const FLOAT_EPS: f64 = 1e-9;

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_pos(&self) -> bool {
        *self > FLOAT_EPS
    }
    fn is_neg(&self) -> bool {
        *self < -FLOAT_EPS
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
}

/// Phase-1 outcome for `A x = b, x >= 0` (with `b >= 0`).
struct PhaseOne<T> {
    /// Optimal value of the sum of artificials.
    objective: T,
    /// Primal values of the structural columns.
    x: Vec<T>,
    /// Optimal dual `y` (one per row).
    dual: Vec<T>,
}

/// Phase 1 of the tableau simplex with Bland's rule.
///
/// `a` is row-major `rows × cols`; every `b_i` must be nonnegative.
fn phase_one<T: LpScalar>(a: &[Vec<T>], b: &[T]) -> PhaseOne<T> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let width = cols + rows + 1;
    let rhs = width - 1;
    let mut tab: Vec<Vec<T>> = Vec::with_capacity(rows + 1);
    for (i, row) in a.iter().enumerate() {
        let mut r = Vec::with_capacity(width);
        r.extend(row.iter().cloned());
        for k in 0..rows {
            r.push(if k == i { T::one() } else { T::zero() });
        }
        r.push(b[i].clone());
        tab.push(r);
    }
    // Reduced costs of the phase-1 objective (cost 1 on artificials).
    let mut obj = vec![T::zero(); width];
    for j in 0..cols {
        let mut s = T::zero();
        for row in tab.iter().take(rows) {
            s = s.add(&row[j]);
        }
        obj[j] = s.neg();
    }
    let mut z = T::zero();
    for row in tab.iter().take(rows) {
        z = z.add(&row[rhs]);
    }
    obj[rhs] = z.neg();
    tab.push(obj);
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    loop {
        let entering = (0..cols + rows).find(|&j| tab[rows][j].is_neg());
        let Some(e) = entering else { break };
        let mut leave: Option<(usize, T)> = None;
        for i in 0..rows {
            if tab[i][e].is_pos() {
                let ratio = tab[i][rhs].div(&tab[i][e]);
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio.lt(lr) || (!lr.lt(&ratio) && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((p, _)) = leave else {
            // Phase 1 is bounded below by zero; an unbounded ray means lost precision.
            break;
        };
        let pivot = tab[p][e].clone();
        for j in 0..width {
            tab[p][j] = tab[p][j].div(&pivot);
        }
        let prow = tab[p].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i == p || row[e].is_zero() {
                continue;
            }
            let factor = row[e].clone();
            for j in 0..width {
                if !prow[j].is_zero() {
                    row[j] = row[j].sub(&factor.mul(&prow[j]));
                }
            }
        }
        basis[p] = e;
    }

    let mut x = vec![T::zero(); cols];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < cols {
            x[bv] = tab[i][rhs].clone();
        }
    }
    // Artificial column k has cost 1 and unit column e_k: r_k = 1 - y_k.
    let dual = (0..rows).map(|k| T::one().sub(&tab[rows][cols + k])).collect();
    PhaseOne { objective: tab[rows][rhs].neg(), x, dual }
}

/// Answer of a separability query with its certificate.
#[derive(Debug, Clone, PartialEq)]
pub enum Separation<T> {
    /// `(v_1, ..., v_d, b)` with `y_i (v·x_i + b) >= 1`.
    Separable(Vec<T>),
    /// Convex weights `u` with `Σ u_i y_i (x_i, 1) = 0`.
    Inseparable(Vec<T>),
}

impl<T> Separation<T> {
    pub fn is_separable(&self) -> bool {
        matches!(self, Separation::Separable(_))
    }
}

/// Exact or floating-point solver selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpMode {
    Exact,
    Float,
}

fn lifted_rows<T: LpScalar>(points: &[&[f64]], labels: &[i8]) -> Vec<Vec<T>> {
    points
        .iter()
        .zip(labels)
        .map(|(p, &y)| {
            let mut row: Vec<T> = p.iter().map(|&c| T::from_f64(c)).collect();
            row.push(T::one());
            if y < 0 {
                row.iter_mut().for_each(|v| *v = v.neg());
            }
            row
        })
        .collect()
}

fn separate_generic<T: LpScalar>(points: &[&[f64]], labels: &[i8]) -> Result<Separation<T>> {
    if points.len() != labels.len() {
        return Err(Error::LengthMismatch { expected: points.len(), got: labels.len() });
    }
    if points.is_empty() {
        return Ok(Separation::Separable(Vec::new()));
    }
    let dim = points[0].len();
    let rows = lifted_rows::<T>(points, labels);
    // Certificate system: columns are the lifted rows, plus a sum-to-one row.
    let mut a: Vec<Vec<T>> = (0..=dim)
        .map(|k| rows.iter().map(|r| r[k].clone()).collect())
        .collect();
    a.push(vec![T::one(); rows.len()]);
    let mut b = vec![T::zero(); dim + 1];
    b.push(T::one());
    let sol = phase_one(&a, &b);

    if sol.objective.is_zero() {
        return Ok(Separation::Inseparable(sol.x));
    }
    let t = sol.dual[dim + 1].clone();
    if !t.is_pos() {
        return Err(Error::Lp("phase-1 dual has nonpositive scale".into()));
    }
    let w: Vec<T> = sol.dual[..=dim].iter().map(|pi| pi.neg().div(&t)).collect();
    Ok(Separation::Separable(w))
}

/// Exact rational separability test; the answer is verified before returning.
pub fn separate_exact(points: &[&[f64]], labels: &[i8]) -> Result<Separation<BigRational>> {
    let sep = separate_generic::<BigRational>(points, labels)?;
    if !verify_exact(points, labels, &sep) {
        return Err(Error::Lp("exact certificate failed verification".into()));
    }
    Ok(sep)
}

/// Floating-point separability test. The witness is rescaled so its minimum
/// margin is at least one.
pub fn separate_float(points: &[&[f64]], labels: &[i8]) -> Result<Separation<f64>> {
    match separate_generic::<f64>(points, labels)? {
        Separation::Separable(w) => {
            let margin = min_margin(points, labels, &w);
            if margin <= 0.0 || !margin.is_finite() {
                return Err(Error::Lp(format!("float witness has margin {margin}")));
            }
            let w: Vec<f64> = w.iter().map(|v| v / margin.min(1.0)).collect();
            Ok(Separation::Separable(w))
        }
        other => Ok(other),
    }
}

/// Smallest `y_i (v·x_i + b)` over the points.
pub fn min_margin(points: &[&[f64]], labels: &[i8], w: &[f64]) -> f64 {
    points
        .iter()
        .zip(labels)
        .map(|(p, &y)| {
            let (v, b) = w.split_at(p.len());
            let s: f64 = v.iter().zip(p.iter()).map(|(a, c)| a * c).sum::<f64>() + b[0];
            y as f64 * s
        })
        .fold(f64::INFINITY, f64::min)
}

/// Checks a rational answer with exact arithmetic.
pub fn verify_exact(points: &[&[f64]], labels: &[i8], sep: &Separation<BigRational>) -> bool {
    let rows = lifted_rows::<BigRational>(points, labels);
    match sep {
        Separation::Separable(w) => rows.iter().all(|r| {
            r.len() == w.len() && {
                let s: BigRational = r.iter().zip(w).map(|(a, b)| a * b).sum();
                s >= <BigRational as One>::one()
            }
        }),
        Separation::Inseparable(u) => {
            if u.len() != rows.len() || u.iter().any(Signed::is_negative) {
                return false;
            }
            let total: BigRational = u.iter().sum();
            if total != <BigRational as One>::one() {
                return false;
            }
            let dim = rows.first().map_or(0, Vec::len);
            (0..dim).all(|k| Zero::is_zero(&rows.iter().zip(u).map(|(r, ui)| &r[k] * ui).sum::<BigRational>()))
        }
    }
}

/// Separability with the solver chosen by `mode`; only the answer is kept.
pub fn is_separable(points: &[&[f64]], labels: &[i8], mode: LpMode) -> Result<bool> {
    Ok(match mode {
        LpMode::Exact => separate_exact(points, labels)?.is_separable(),
        LpMode::Float => separate_float(points, labels)?.is_separable(),
    })
}

/// Small integer helper for tests and diagnostics.
pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from_i64(n).unwrap(), BigInt::from_i64(d).unwrap())
}
