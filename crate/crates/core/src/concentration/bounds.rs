//! Closed-form probability bounds: McDiarmid's inequality and the
//! approximation and uniform-convergence guarantees built on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameter vector `c` of the bounded-differences condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BdParameters {
    c: Vec<f64>,
    norm_sq: f64,
}

impl BdParameters {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::Precondition("BD parameter vector is empty".into()));
        }
        if let Some(bad) = c.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::Precondition(format!("BD parameter {bad} is not positive")));
        }
        let norm_sq = c.iter().map(|x| x * x).sum();
        Ok(BdParameters { c, norm_sq })
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// `||c||²`.
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }
}

/// `c_i = 4/m` for the approximation functional `eta_h`.
pub fn bd_parameters_eta(m: usize) -> Result<BdParameters> {
    if m == 0 {
        return Err(Error::Precondition("m must be >= 1".into()));
    }
    BdParameters::new(vec![4.0 / m as f64; m])
}

/// `c_i = 2b/n` for the empirical error over `n` samples with loss in `[0, b]`.
pub fn bd_parameters_empirical(n: usize, b: f64) -> Result<BdParameters> {
    if n == 0 || !(b > 0.0) {
        return Err(Error::Precondition("need n >= 1 and b > 0".into()));
    }
    BdParameters::new(vec![2.0 * b / n as f64; n])
}

/// `exp(-2 λ² / ||c||²)`.
pub fn mcdiarmid_bound(lambda: f64, c: &BdParameters) -> Result<f64> {
    check_lambda(lambda)?;
    Ok((-2.0 * lambda * lambda / c.norm_sq).exp())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Precondition(format!("lambda must be positive, got {lambda}")));
    }
    Ok(())
}

/// `max(0, 1 - exp(ln_growth - exponent))`, together with the log of the
/// failure term.
fn one_minus(ln_growth: f64, exponent: f64) -> (f64, f64) {
    let log_fail = ln_growth - exponent;
    ((1.0 - log_fail.exp()).max(0.0), log_fail)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thm2Bounds {
    /// `max(0, 1 - growth · e^{-mλ²/8})` for `dist² >= mu - λ`.
    pub lower: f64,
    /// `1 - e^{-mλ²/8}` for `dist² <= mu + λ`.
    pub upper: f64,
    pub log_fail_lower: f64,
    pub log_fail_upper: f64,
}

pub fn thm2_bounds(m: usize, lambda: f64, growth: u64) -> Result<Thm2Bounds> {
    if growth == 0 {
        return Err(Error::Precondition("growth must be >= 1".into()));
    }
    thm2_bounds_ln(m, lambda, (growth as f64).ln())
}

/// Same as [`thm2_bounds`] with the growth value given as its natural log.
pub fn thm2_bounds_ln(m: usize, lambda: f64, ln_growth: f64) -> Result<Thm2Bounds> {
    if m == 0 {
        return Err(Error::Precondition("m must be >= 1".into()));
    }
    check_lambda(lambda)?;
    let exponent = m as f64 * lambda * lambda / 8.0;
    let (lower, log_fail_lower) = one_minus(ln_growth, exponent);
    let (upper, log_fail_upper) = one_minus(0.0, exponent);
    Ok(Thm2Bounds { lower, upper, log_fail_lower, log_fail_upper })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thm3Bounds {
    /// Exponent `nλ²/(2b⁴)`.
    pub printed: f64,
    /// Exponent `nλ²/(2b²)`, from `||c||² = 4b²/n`.
    pub derived: f64,
    pub log_fail_printed: f64,
    pub log_fail_derived: f64,
}

pub fn thm3_bound(n: usize, lambda: f64, b: f64, growth: u64) -> Result<Thm3Bounds> {
    if growth == 0 {
        return Err(Error::Precondition("growth must be >= 1".into()));
    }
    thm3_bound_ln(n, lambda, b, (growth as f64).ln())
}

pub fn thm3_bound_ln(n: usize, lambda: f64, b: f64, ln_growth: f64) -> Result<Thm3Bounds> {
    if n == 0 || !(b > 0.0) {
        return Err(Error::Precondition("need n >= 1 and b > 0".into()));
    }
    check_lambda(lambda)?;
    let base = n as f64 * lambda * lambda / 2.0;
    let (printed, log_fail_printed) = one_minus(ln_growth, base / b.powi(4));
    let (derived, log_fail_derived) = one_minus(ln_growth, base / (b * b));
    Ok(Thm3Bounds { printed, derived, log_fail_printed, log_fail_derived })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Mcdiarmid,
    Thm2Lower,
    Thm2Upper,
    Thm3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Thm3Variant {
    /// Exponent with `2b⁴`.
    Printed,
    /// Exponent with `2b²`.
    Derived,
}

/// One evaluated bound with every parameter needed to recompute it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundSpec {
    pub kind: BoundKind,
    pub m_or_n: usize,
    pub lambda: f64,
    pub b: Option<f64>,
    pub ln_growth: f64,
    pub variant: Option<Thm3Variant>,
    /// Clipped to `[0, 1]`.
    pub bound_value: f64,
    /// Natural log of the failure term `growth · e^{-exponent}`.
    pub log_failure: f64,
}

impl BoundSpec {
    pub fn evaluate(
        kind: BoundKind,
        m_or_n: usize,
        lambda: f64,
        b: Option<f64>,
        ln_growth: f64,
        variant: Option<Thm3Variant>,
    ) -> Result<Self> {
        let (bound_value, log_failure) = match kind {
            BoundKind::Mcdiarmid => {
                // Bounds the deviation probability; m_or_n · c_i² = 16 for eta.
                let c = bd_parameters_eta(m_or_n)?;
                let v = mcdiarmid_bound(lambda, &c)?;
                (v, v.ln())
            }
            BoundKind::Thm2Lower => {
                let t = thm2_bounds_ln(m_or_n, lambda, ln_growth)?;
                (t.lower, t.log_fail_lower)
            }
            BoundKind::Thm2Upper => {
                let t = thm2_bounds_ln(m_or_n, lambda, ln_growth)?;
                (t.upper, t.log_fail_upper)
            }
            BoundKind::Thm3 => {
                let bb = b.ok_or_else(|| Error::Precondition("uniform-convergence bound needs b".into()))?;
                let t = thm3_bound_ln(m_or_n, lambda, bb, ln_growth)?;
                match variant.unwrap_or(Thm3Variant::Printed) {
                    Thm3Variant::Printed => (t.printed, t.log_fail_printed),
                    Thm3Variant::Derived => (t.derived, t.log_fail_derived),
                }
            }
        };
        Ok(BoundSpec { kind, m_or_n, lambda, b, ln_growth, variant, bound_value, log_failure })
    }

    /// Recomputes `bound_value` from the stored parameters.
    pub fn recompute(&self) -> Result<f64> {
        Ok(Self::evaluate(self.kind, self.m_or_n, self.lambda, self.b, self.ln_growth, self.variant)?.bound_value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorollaryMode {
    ApproxLower,
    ApproxUpper,
    UniformConv,
    UniformConvDerived,
}

/// Instantiates the bounds at `λ = (m_or_n)^{-1/4}`.
pub fn corollary_rates(m_or_n: usize, mode: CorollaryMode, ln_growth: f64, b: f64) -> Result<BoundSpec> {
    if m_or_n == 0 {
        return Err(Error::Precondition("m_or_n must be >= 1".into()));
    }
    let lambda = (m_or_n as f64).powf(-0.25);
    match mode {
        CorollaryMode::ApproxLower => BoundSpec::evaluate(BoundKind::Thm2Lower, m_or_n, lambda, None, ln_growth, None),
        CorollaryMode::ApproxUpper => BoundSpec::evaluate(BoundKind::Thm2Upper, m_or_n, lambda, None, 0.0, None),
        CorollaryMode::UniformConv => {
            BoundSpec::evaluate(BoundKind::Thm3, m_or_n, lambda, Some(b), ln_growth, Some(Thm3Variant::Printed))
        }
        CorollaryMode::UniformConvDerived => {
            BoundSpec::evaluate(BoundKind::Thm3, m_or_n, lambda, Some(b), ln_growth, Some(Thm3Variant::Derived))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mcdiarmid_cases() {
        let eta8 = bd_parameters_eta(8).unwrap();
        assert!((mcdiarmid_bound(1.0, &eta8).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((mcdiarmid_bound(1e-9, &eta8).unwrap() - 1.0).abs() < 1e-15);
        let emp = bd_parameters_empirical(2, 1.0).unwrap();
        assert!((mcdiarmid_bound(1.0, &emp).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!(mcdiarmid_bound(0.0, &emp).is_err());
        assert!(mcdiarmid_bound(-1.0, &emp).is_err());
    }

    #[test]
    fn bd_parameter_vectors() {
        let p = bd_parameters_eta(4).unwrap();
        assert!(p.c().iter().all(|&c| c == 1.0));
        assert_eq!(p.norm_sq(), 4.0);
        assert_eq!(bd_parameters_eta(16).unwrap().norm_sq(), 1.0);
        for m in 1..50 {
            assert!((bd_parameters_eta(m).unwrap().norm_sq() * m as f64 - 16.0).abs() < 1e-12);
        }
        let e = bd_parameters_empirical(2, 1.0).unwrap();
        assert_eq!(e.c(), &[1.0, 1.0]);
        assert_eq!(e.norm_sq(), 2.0);
        assert!((bd_parameters_empirical(36, 3.0).unwrap().norm_sq() - 1.0).abs() < 1e-12);
        let a = bd_parameters_empirical(5, 0.5).unwrap();
        let b = bd_parameters_empirical(5, 1.0).unwrap();
        assert!(a.c().iter().zip(b.c()).all(|(x, y)| 2.0 * x == *y));
        assert!(bd_parameters_eta(0).is_err());
        assert!(bd_parameters_empirical(1, 0.0).is_err());
        assert!(BdParameters::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn thm2_cases() {
        let t = thm2_bounds(50, 0.3, 1).unwrap();
        assert_eq!(t.lower, t.upper);
        let t = thm2_bounds(800, 0.4, 100).unwrap();
        let expected = 1.0 - 100.0 * (-16.0f64).exp();
        assert!((t.lower - expected).abs() < 1e-15);
        assert!((t.upper - (1.0 - (-16.0f64).exp())).abs() < 1e-15);
        assert_eq!(thm2_bounds(10, 0.1, 1000).unwrap().lower, 0.0);
        assert!(thm2_bounds(0, 0.1, 1).is_err());
        assert!(thm2_bounds(5, 0.1, 0).is_err());
    }

    #[test]
    fn thm3_cases() {
        let t = thm3_bound(100, 0.3, 1.0, 7).unwrap();
        assert_eq!(t.printed, t.derived);
        let t = thm3_bound(32, 1.0, 1.0, 2).unwrap();
        assert!((t.printed - (1.0 - 2.0 * (-16.0f64).exp())).abs() < 1e-15);
        let t = thm3_bound(64, 0.5, 2.0, 3).unwrap();
        assert!((t.printed - (1.0 - 3.0 * (-0.5f64).exp())).max(0.0) < 1e-15 || t.printed == 0.0);
        assert!((t.derived - (1.0 - 3.0 * (-2.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn corollary_cases() {
        let s = corollary_rates(16, CorollaryMode::ApproxUpper, 0.0, 1.0).unwrap();
        assert_eq!(s.lambda, 0.5);
        assert!((s.bound_value - (1.0 - (-0.5f64).exp())).abs() < 1e-15);
        let m = 10_000usize;
        let g = 50.0f64;
        let s = corollary_rates(m, CorollaryMode::ApproxLower, g.ln(), 1.0).unwrap();
        let eq7 = 1.0 - g * (-(m as f64).sqrt() / 8.0).exp();
        assert!((s.bound_value - eq7.max(0.0)).abs() < 1e-12);
        let n = 4096usize;
        let b = 1.5;
        let s = corollary_rates(n, CorollaryMode::UniformConv, g.ln(), b).unwrap();
        let eq9 = 1.0 - g * (-(n as f64).sqrt() / (2.0 * b.powi(4))).exp();
        assert!((s.bound_value - eq9.max(0.0)).abs() < 1e-12);
        assert_eq!(s.recompute().unwrap(), s.bound_value);
    }
}
