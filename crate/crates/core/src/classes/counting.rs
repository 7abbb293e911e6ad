//! Closed-form dichotomy counts and growth-function bounds.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// `binom(n, k)` as a big integer.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut r = BigUint::one();
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Number of homogeneous-halfspace dichotomies of `m` points in general
/// position in `R^d`: `2 Σ_{i<d} binom(m-1, i)`. Affine halfspaces in `R^d`
/// correspond to `cover_count(m, d + 1)`.
pub fn cover_count(m: u64, d: u64) -> Result<BigUint> {
    if m == 0 || d == 0 {
        return Err(Error::Precondition(format!("cover_count needs m, d >= 1 (got {m}, {d})")));
    }
    let s: BigUint = (0..d).map(|i| binomial(m - 1, i)).sum();
    Ok(s * 2u32)
}

/// `m^(d_V + 1)`, stated for `m > d_V`.
pub fn vc_polynomial_bound(m: u64, d_v: u64) -> Result<BigUint> {
    if m <= d_v {
        return Err(Error::Precondition(format!("polynomial bound needs m > d_V (m = {m}, d_V = {d_v})")));
    }
    Ok(BigUint::from(m).pow((d_v + 1) as u32))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SauerShelah {
    /// `Σ_{i <= d_V} binom(m, i)`.
    #[serde(serialize_with = "crate::classes::ser_big")]
    pub sum: BigUint,
    /// `(e m / d_V)^d_V`; infinite when it overflows `f64`.
    pub envelope: f64,
    pub ln_envelope: f64,
}

pub fn sauer_shelah_bound(m: u64, d_v: u64) -> Result<SauerShelah> {
    if d_v == 0 || m <= d_v {
        return Err(Error::Precondition(format!(
            "Sauer-Shelah bound needs m > d_V >= 1 (m = {m}, d_V = {d_v})"
        )));
    }
    let sum = (0..=d_v).map(|i| binomial(m, i)).sum();
    let ln_envelope = d_v as f64 * (std::f64::consts::E * m as f64 / d_v as f64).ln();
    Ok(SauerShelah { sum, envelope: ln_envelope.exp(), ln_envelope })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bartlett {
    /// `L W ln(4 e L m)`.
    pub log: f64,
    /// `(4 e L m)^(L W)` when finite.
    pub value: Option<f64>,
}

/// Growth bound `(4 e L m)^(L W)` for ReLU networks of depth `L` with `W` parameters.
pub fn bartlett_bound(m: u64, depth: u64, params: u64) -> Result<Bartlett> {
    if m == 0 || depth == 0 || params == 0 {
        return Err(Error::Precondition("Bartlett bound needs m, L, W >= 1".into()));
    }
    let base = 4.0 * std::f64::consts::E * depth as f64 * m as f64;
    let exp = (depth * params) as f64;
    let log = exp * base.ln();
    let value = base.powf(exp);
    Ok(Bartlett { log, value: value.is_finite().then_some(value) })
}

/// Natural log of a big integer, accurate for values beyond `f64` range.
pub fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 2), big(45));
        assert_eq!(binomial(16, 3), big(560));
        assert_eq!(binomial(5, 0), big(1));
        assert_eq!(binomial(3, 4), big(0));
        assert_eq!(binomial(60, 30), big(118_264_581_564_861_424));
    }

    #[test]
    fn cover_counts() {
        for m in 1..=6u64 {
            for d in m..m + 3 {
                assert_eq!(cover_count(m, d).unwrap(), big(1 << m));
            }
        }
        assert_eq!(cover_count(3, 2).unwrap(), big(6));
        assert_eq!(cover_count(4, 3).unwrap(), big(14));
        assert_eq!(cover_count(3, 3).unwrap(), big(8));
        assert!(cover_count(0, 2).is_err());
    }

    #[test]
    fn cover_recurrence_small() {
        for m in 2..=30u64 {
            for d in 2..=30u64 {
                let lhs = cover_count(m, d).unwrap();
                let rhs = cover_count(m - 1, d).unwrap() + cover_count(m - 1, d - 1).unwrap();
                assert_eq!(lhs, rhs, "m = {m}, d = {d}");
            }
        }
        assert_eq!(cover_count(1, 7).unwrap(), big(2));
    }

    #[test]
    fn polynomial_bound() {
        assert_eq!(vc_polynomial_bound(10, 2).unwrap(), big(1000));
        assert_eq!(vc_polynomial_bound(2, 1).unwrap(), big(4));
        assert_eq!(vc_polynomial_bound(16, 3).unwrap(), big(65536));
        assert!(vc_polynomial_bound(5, 5).is_err());
    }

    #[test]
    fn sauer_shelah() {
        let s = sauer_shelah_bound(10, 2).unwrap();
        assert_eq!(s.sum, big(56));
        assert!((s.envelope - (std::f64::consts::E * 5.0).powi(2)).abs() < 1e-9);
        assert!(s.envelope >= 56.0);
        assert_eq!(sauer_shelah_bound(4, 3).unwrap().sum, big(15));
        assert_eq!(sauer_shelah_bound(16, 3).unwrap().sum, big(697));
        assert!(sauer_shelah_bound(3, 3).is_err());
        assert!(sauer_shelah_bound(3, 0).is_err());
    }

    #[test]
    fn bartlett() {
        let b = bartlett_bound(1, 1, 1).unwrap();
        assert!((b.value.unwrap() - 4.0 * std::f64::consts::E).abs() < 1e-12);
        let big_b = bartlett_bound(1_000_000, 2, 100).unwrap();
        assert!((big_b.log - 200.0 * (8.0 * std::f64::consts::E * 1e6).ln()).abs() < 1e-9);
        assert!((big_b.log - 3378.990_419_9).abs() < 1e-6);
        assert!(big_b.value.is_none());
    }

    #[test]
    fn big_logs() {
        assert!((ln_big(&big(1000)) - 1000f64.ln()).abs() < 1e-12);
        let huge = BigUint::from(3u32).pow(2000);
        assert!((ln_big(&huge) - 2000.0 * 3f64.ln()).abs() < 1e-9);
    }
}
