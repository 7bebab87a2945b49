//! Hyperparameter rules for the empirical-Bayes gamma prior Γ(1/2, α).

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::{Counts, ModelConfig};

/// How α is chosen from the observed counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HyperRule {
    /// α = r b / (Σx + 1).
    Moment { b: f64 },
    /// Marginal maximum likelihood, α = r d / (2 Σx).
    Mle,
    /// Minimizer of the unbiased K-L risk estimate U(α).
    Ure,
}

impl HyperRule {
    /// Moment rule with the default b = d/2 - 1.
    pub fn natural(d: usize) -> Self {
        HyperRule::Moment { b: natural_b(d) }
    }

    /// Rule used in place of MLE/URE when Σx = 0: the moment rule with
    /// b = max(d/2 - 1, smallest positive double).
    pub fn fallback_moment(d: usize) -> Self {
        HyperRule::Moment { b: natural_b(d).max(f64::MIN_POSITIVE) }
    }

    pub fn name(&self) -> &'static str {
        match self {
            HyperRule::Moment { .. } => "moment",
            HyperRule::Mle => "mle",
            HyperRule::Ure => "ure",
        }
    }
}

/// b = d/2 - 1.
pub fn natural_b(d: usize) -> f64 {
    0.5 * d as f64 - 1.0
}

/// Whether `b` lies in the range 0 < b <= d - 2 for which the moment rule is
/// guaranteed to dominate the Jeffreys predictive (requires d >= 3).
pub fn moment_dominates(b: f64, d: usize) -> bool {
    d >= 3 && b > 0.0 && b <= d as f64 - 2.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaEstimate {
    pub alpha: f64,
    /// Set for moment rules outside the dominance range.
    pub no_dominance_guarantee: bool,
}

pub fn alpha_moment(sum_x: u64, r: f64, b: f64) -> Result<f64> {
    if !(b.is_finite() && b > 0.0) {
        return domain(format!("moment rule requires b > 0, got {b}"));
    }
    Ok(r * b / (sum_x as f64 + 1.0))
}

pub fn alpha_mle(sum_x: u64, r: f64, d: usize) -> Result<f64> {
    if sum_x == 0 {
        return Err(Error::UndefinedEstimator(
            "the marginal MLE of α is not defined when all counts are zero".into(),
        ));
    }
    Ok(r * d as f64 / (2.0 * sum_x as f64))
}

/// Evaluates `rule` on the observed counts.
pub fn estimate(rule: HyperRule, x: &Counts, cfg: &ModelConfig) -> Result<AlphaEstimate> {
    x.conform(cfg)?;
    match rule {
        HyperRule::Moment { b } => Ok(AlphaEstimate {
            alpha: alpha_moment(x.sum(), cfg.r, b)?,
            no_dominance_guarantee: !moment_dominates(b, cfg.d),
        }),
        HyperRule::Mle => Ok(AlphaEstimate { alpha: alpha_mle(x.sum(), cfg.r, cfg.d)?, no_dominance_guarantee: true }),
        HyperRule::Ure => Ok(AlphaEstimate { alpha: ure_argmin(x, cfg)?, no_dominance_guarantee: true }),
    }
}

/// U(α) = Σ_i [ -(x_i + 1/2) ln((r+α)/(r+s+α)) + (s/r) x_i ln(r+s+α) ].
pub fn ure_value(alpha: f64, x: &Counts, cfg: &ModelConfig) -> Result<f64> {
    x.conform(cfg)?;
    if !(alpha.is_finite() && alpha > 0.0) {
        return domain(format!("U(α) requires α > 0, got {alpha}"));
    }
    let (r, s) = (cfg.r, cfg.s);
    let big_x = x.sum() as f64;
    let shrink = ((r + alpha) / (r + s + alpha)).ln();
    Ok(-(big_x + cfg.half_d()) * shrink + s / r * big_x * (r + s + alpha).ln())
}

/// U(a) - U(b), computed from logarithms of ratios so the difference keeps
/// relative accuracy when a and b are close.
fn ure_difference(a: f64, b: f64, sum_x: f64, cfg: &ModelConfig) -> f64 {
    let (r, s) = (cfg.r, cfg.s);
    let l1 = ((a - b) / (r + b)).ln_1p();
    let l2 = ((a - b) / (r + s + b)).ln_1p();
    -(sum_x + cfg.half_d()) * (l1 - l2) + s / r * sum_x * l2
}

/// Minimizer of U over α > 0, which is r d / (2 Σx).
pub fn ure_argmin(x: &Counts, cfg: &ModelConfig) -> Result<f64> {
    x.conform(cfg)?;
    let alpha = alpha_mle(x.sum(), cfg.r, cfg.d).map_err(|_| {
        Error::UndefinedEstimator("U(α) is monotone with no interior minimum when all counts are zero".into())
    })?;
    #[cfg(debug_assertions)]
    {
        let numeric = ure_argmin_numeric(x, cfg)?;
        debug_assert!(
            (numeric - alpha).abs() <= 1e-8 * alpha,
            "numerical URE minimizer {numeric} disagrees with closed form {alpha}"
        );
    }
    Ok(alpha)
}

/// Golden-section search for the minimizer of U on ln α ∈ [-30, 30].
pub fn ure_argmin_numeric(x: &Counts, cfg: &ModelConfig) -> Result<f64> {
    x.conform(cfg)?;
    if x.sum() == 0 {
        return Err(Error::UndefinedEstimator(
            "U(α) is monotone with no interior minimum when all counts are zero".into(),
        ));
    }
    let sum_x = x.sum() as f64;
    let diff = |a: f64, b: f64| ure_difference(a, b, sum_x, cfg);
    Ok(golden_section_log(diff, -30.0, 30.0).exp())
}

/// Golden-section search in t = ln α given a comparator returning f(a) - f(b).
fn golden_section_log<F: Fn(f64, f64) -> f64>(diff: F, mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    while hi - lo > 1e-14 * (1.0 + lo.abs().max(hi.abs())) {
        if diff(c.exp(), d.exp()) < 0.0 {
            hi = d;
            d = c;
            c = hi - inv_phi * (hi - lo);
        } else {
            lo = c;
            c = d;
            d = lo + inv_phi * (hi - lo);
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg(d: usize, r: f64, s: f64) -> ModelConfig {
        ModelConfig::new(d, r, s).unwrap()
    }

    /// Counts with the requested total spread over d coordinates.
    fn counts_with_sum(d: usize, total: u64) -> Counts {
        let mut v = vec![0; d];
        for i in 0..total {
            v[(i as usize) % d] += 1;
        }
        Counts::new(v)
    }

    #[test]
    fn moment_examples() {
        assert_relative_eq!(alpha_moment(0, 1.0, 0.5).unwrap(), 0.5);
        assert_relative_eq!(alpha_moment(9, 2.0, 1.0).unwrap(), 0.2);
        assert!(alpha_moment(1_000_000_000, 1.0, 1.0).unwrap() < 1e-8);
        assert!(alpha_moment(3, 1.0, 0.0).is_err());
    }

    #[test]
    fn mle_examples() {
        assert_relative_eq!(alpha_mle(8, 1.0, 4).unwrap(), 0.25);
        assert_relative_eq!(alpha_mle(1, 2.0, 3).unwrap(), 3.0);
        assert!(matches!(alpha_mle(0, 1.0, 3), Err(Error::UndefinedEstimator(_))));
    }

    #[test]
    fn ure_value_example() {
        let v = ure_value(1.0, &Counts::from([1]), &cfg(1, 1.0, 1.0)).unwrap();
        assert_relative_eq!(v, -1.5 * (2.0f64 / 3.0).ln() + 3f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(v, 1.706_809_950_830_356, max_relative = 1e-14);
    }

    #[test]
    fn ure_argmin_examples() {
        let a = ure_argmin(&counts_with_sum(4, 8), &cfg(4, 1.0, 1.0)).unwrap();
        assert_relative_eq!(a, 0.25, max_relative = 1e-8);
        let a = ure_argmin_numeric(&counts_with_sum(3, 3), &cfg(3, 2.0, 1.0)).unwrap();
        assert_relative_eq!(a, 1.0, max_relative = 1e-8);
        let a = ure_argmin_numeric(&counts_with_sum(1, 2), &cfg(1, 1.0, 5.0)).unwrap();
        assert_relative_eq!(a, 0.25, max_relative = 1e-8);
    }

    #[test]
    fn ure_undefined_at_zero_counts() {
        let c = cfg(3, 1.0, 1.0);
        let zero = Counts::zeros(3);
        assert!(matches!(ure_argmin(&zero, &c), Err(Error::UndefinedEstimator(_))));
        assert!(matches!(ure_argmin_numeric(&zero, &c), Err(Error::UndefinedEstimator(_))));
        // U is strictly decreasing in α when Σx = 0: no interior minimum.
        let mut prev = f64::INFINITY;
        for k in -10..10 {
            let v = ure_value(10f64.powi(k), &zero, &c).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn estimate_flags_rules_without_guarantee() {
        let c = cfg(3, 1.0, 1.0);
        let x = Counts::from([1, 0, 2]);
        let e = estimate(HyperRule::natural(3), &x, &c).unwrap();
        assert_relative_eq!(e.alpha, 0.5 / 4.0);
        assert!(!e.no_dominance_guarantee);
        let e = estimate(HyperRule::Moment { b: 3.0 }, &x, &c).unwrap();
        assert!(e.no_dominance_guarantee);
        assert!(estimate(HyperRule::Mle, &Counts::zeros(3), &c).is_err());
        assert!(estimate(HyperRule::Mle, &Counts::zeros(2), &c).is_err());
    }

    #[test]
    fn fallback_rule_is_positive() {
        match HyperRule::fallback_moment(2) {
            HyperRule::Moment { b } => assert!(b > 0.0),
            _ => unreachable!(),
        }
        assert_eq!(HyperRule::fallback_moment(4), HyperRule::Moment { b: 1.0 });
    }
}
