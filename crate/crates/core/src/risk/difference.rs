//! Risk reductions relative to the Jeffreys predictive.
//!
//! For the moment rule α = r b / (X+1) and for the shrinkage prior, the
//! log-ratio against the Jeffreys predictive depends on the data only through
//! the totals X = Σx ~ Po(rμ) and Y = Σy ~ Po(sμ), so every difference here is
//! a function of μ = Σλ alone.

use super::jeffreys::risk_jeffreys_direct;
use super::{Estimate, RiskPoint};
use crate::error::{domain, Result};
use crate::model::ModelConfig;
use crate::predictive::shrinkage_log_ratio;
use crate::special::{poisson_expectation, try_poisson_expectation, Growth, SeriesPolicy};

/// Slack added to outer growth certificates to absorb the error of the inner
/// expectations they are built from.
const INNER_SLACK: f64 = 1e-3;

fn check_mu_b(mu: f64, b: f64, cfg: &ModelConfig) -> Result<()> {
    cfg.validate()?;
    if !(mu.is_finite() && mu > 0.0) {
        return domain(format!("μ must be finite and positive, got {mu}"));
    }
    if !(b.is_finite() && b > 0.0) {
        return domain(format!("b must be finite and positive, got {b}"));
    }
    Ok(())
}

/// E[ln p̂_α(y|x) - ln p_J(y|x)] for α = r b/(X+1), after eliminating Y with
/// E[Y g(X)] = (s/r) E[X g(X-1)]. Positive values favour the EB predictive.
pub fn risk_diff_eb(mu: f64, b: f64, cfg: &ModelConfig, policy: &SeriesPolicy) -> Result<RiskPoint> {
    check_mu_b(mu, b, cfg)?;
    let (r, s, c) = (cfg.r, cfg.s, cfg.half_d());
    let q = s / (r + s);
    let keep = r / (r + s);
    let h = |x: u64| {
        let bx = x as f64;
        let first = -(bx + c) * (-q * b / (bx + 1.0 + b)).ln_1p();
        let second = if x == 0 { 0.0 } else { s / r * bx * (keep * b / bx).ln_1p() };
        first - second
    };
    let growth = Growth::bounded(q * b * (c.max(1.0) + 1.0));
    let e = poisson_expectation(h, r * mu, &policy.with_growth(growth))?;
    Ok(RiskPoint::at_mu(mu, Estimate { value: e.value, err_bound: e.err_bound }))
}

/// Expectation over X ~ Po(rμ) of an inner expectation over Y ~ Po(sμ).
/// `inner_growth(X)` certifies the summand in Y at fixed X.
fn double_expectation<H, G>(
    mu: f64,
    cfg: &ModelConfig,
    policy: &SeriesPolicy,
    summand: H,
    inner_growth: G,
    outer_growth: Growth,
) -> Result<Estimate>
where
    H: Fn(u64, u64) -> f64,
    G: Fn(u64) -> Growth,
{
    let half = policy.with_tol(0.5 * policy.tail_tol);
    let mut worst_inner = 0.0f64;
    let outer = try_poisson_expectation(
        |x| {
            let e = poisson_expectation(|y| summand(x, y), cfg.s * mu, &half.with_growth(inner_growth(x)))?;
            worst_inner = worst_inner.max(e.err_bound);
            Ok(e.value)
        },
        cfg.r * mu,
        &half.with_growth(outer_growth),
    )?;
    Ok(Estimate { value: outer.value, err_bound: outer.err_bound + worst_inner })
}

/// The same difference as [`risk_diff_eb`] evaluated before eliminating Y:
/// E[(X+d/2) ln(1 + b/(X+1)) - (X+Y+d/2) ln(1 + r b/((r+s)(X+1)))].
pub fn risk_diff_eb_unreduced(mu: f64, b: f64, cfg: &ModelConfig, policy: &SeriesPolicy) -> Result<RiskPoint> {
    check_mu_b(mu, b, cfg)?;
    let (r, s, c) = (cfg.r, cfg.s, cfg.half_d());
    let keep = r / (r + s);
    let past = |x: u64| (b / (x as f64 + 1.0)).ln_1p();
    let joint = |x: u64| (keep * b / (x as f64 + 1.0)).ln_1p();
    let summand = |x: u64, y: u64| {
        let bx = x as f64;
        (bx + c) * past(x) - (bx + y as f64 + c) * joint(x)
    };
    // Linear in Y: |H| <= (X+c) past + (X+c+Y) joint <= A_X (1+Y).
    let inner = |x: u64| Growth::bounded((x as f64 + c) * past(x) + (x as f64 + c + 1.0) * joint(x)).with_power(1.0);
    let outer = Growth::bounded(b * c.max(1.0) + keep * b * (c.max(1.0) + s * mu) + INNER_SLACK);
    let est = double_expectation(mu, cfg, policy, summand, inner, outer)?;
    Ok(RiskPoint::at_mu(mu, est))
}

/// E[ln p_S(y|x) - ln p_J(y|x)] for the shrinkage prior. Zero when d = 2.
pub fn risk_diff_shrinkage(mu: f64, cfg: &ModelConfig, policy: &SeriesPolicy) -> Result<RiskPoint> {
    check_mu_b(mu, 1.0, cfg)?;
    if cfg.d < 2 {
        return domain("the shrinkage prior requires d >= 2");
    }
    if cfg.d == 2 {
        return Ok(RiskPoint::at_mu(mu, Estimate { value: 0.0, err_bound: 0.0 }));
    }
    // |ln Γ(z+c) - ln Γ(z+1)| <= (c-1)(γ + ln c + ln(1+z)) for c >= 1, and
    // ln(1+X+Y) <= ln(1+X) + ln(1+Y).
    let c = cfg.half_d();
    let k = c - 1.0;
    let base = cfg.log_ratio() + 2.0 * (0.58 + c.ln());
    let inner = |x: u64| Growth::log(k * (base + 2.0 * (x as f64).ln_1p()), k);
    let outer = Growth::log(k * (base + (cfg.s * mu).ln_1p()) + INNER_SLACK, 2.0 * k);
    let est = double_expectation(mu, cfg, policy, |x, y| shrinkage_log_ratio(x, y, cfg), inner, outer)?;
    Ok(RiskPoint::at_mu(mu, est))
}

/// Risk of the moment-rule EB predictive at a full rate vector.
pub fn risk_eb_at(lambda: &[f64], b: f64, cfg: &ModelConfig, policy: &SeriesPolicy) -> Result<RiskPoint> {
    let jeffreys = risk_jeffreys_direct(lambda, cfg, policy)?;
    let mu: f64 = lambda.iter().sum();
    let diff = risk_diff_eb(mu, b, cfg, policy)?;
    Ok(RiskPoint::at_lambda(
        lambda,
        Estimate { value: jeffreys.value - diff.value, err_bound: jeffreys.err_bound + diff.err_bound },
    ))
}

/// Risk of the moment-rule EB predictive at λ_i = μ/d for every coordinate.
pub fn risk_eb(mu: f64, b: f64, cfg: &ModelConfig, policy: &SeriesPolicy) -> Result<RiskPoint> {
    check_mu_b(mu, b, cfg)?;
    let lambda = vec![mu / cfg.d as f64; cfg.d];
    let point = risk_eb_at(&lambda, b, cfg, policy)?;
    Ok(RiskPoint::at_mu(mu, point.estimate()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(d: usize) -> ModelConfig {
        ModelConfig::new(d, 1.0, 1.0).unwrap()
    }

    #[test]
    fn eb_small_mu_limit() {
        let p = SeriesPolicy::default();
        let limit = 1.5 * (6.0f64 / 5.0).ln();
        let v = risk_diff_eb(1e-6, 0.5, &cfg(3), &p).unwrap();
        assert!((v.value - limit).abs() < 1e-5);
        let u = risk_diff_eb_unreduced(1e-6, 0.5, &cfg(3), &p).unwrap();
        assert!((u.value - limit).abs() < 1e-5);
    }

    #[test]
    fn eb_decays_for_large_mu() {
        let p = SeriesPolicy::default();
        let far = risk_diff_eb(1000.0, 0.5, &cfg(3), &p).unwrap();
        let farther = risk_diff_eb(2000.0, 0.5, &cfg(3), &p).unwrap();
        assert!(far.value < 1e-2);
        assert!(farther.value < far.value);
    }

    #[test]
    fn eb_identity_holds() {
        let p = SeriesPolicy::default();
        for d in [3, 8] {
            let b = 0.5 * d as f64 - 1.0;
            for mu in [0.5, 2.0, 10.0] {
                let a = risk_diff_eb(mu, b, &cfg(d), &p).unwrap();
                let u = risk_diff_eb_unreduced(mu, b, &cfg(d), &p).unwrap();
                assert!((a.value - u.value).abs() < 1e-9, "d={d} μ={mu}: {} vs {}", a.value, u.value);
            }
        }
    }

    #[test]
    fn shrinkage_is_zero_at_d2() {
        let p = SeriesPolicy::default();
        for mu in [0.1, 3.0, 40.0] {
            assert_eq!(risk_diff_shrinkage(mu, &cfg(2), &p).unwrap().value, 0.0);
        }
    }

    #[test]
    fn shrinkage_beats_jeffreys_at_d3() {
        let p = SeriesPolicy::default();
        for k in 1..=16 {
            let mu = 0.5 * k as f64;
            let v = risk_diff_shrinkage(mu, &cfg(3), &p).unwrap();
            assert!(v.value > v.err_bound, "μ={mu}: {}", v.value);
        }
    }

    #[test]
    fn eb_beats_shrinkage_near_three() {
        let p = SeriesPolicy::default();
        let eb = risk_diff_eb(3.0, 0.5, &cfg(3), &p).unwrap();
        let sh = risk_diff_shrinkage(3.0, &cfg(3), &p).unwrap();
        assert!(sh.value + sh.err_bound < eb.value - eb.err_bound);
    }

    #[test]
    fn risk_eb_is_below_jeffreys_and_bound() {
        let p = SeriesPolicy::default();
        let c = cfg(3);
        for mu in [0.1, 1.0, 10.0, 50.0] {
            let eb = risk_eb(mu, 0.5, &c, &p).unwrap();
            let j = risk_jeffreys_direct(&[mu / 3.0; 3], &c, &p).unwrap();
            assert!(eb.value < j.value);
            assert!(eb.value < 1.04 * c.minimax_bound());
        }
        let far = risk_eb(500.0, 0.5, &c, &p).unwrap();
        assert!((far.value - 1.5 * 2f64.ln()).abs() < 0.01);
    }

    #[test]
    fn rejects_bad_arguments() {
        let p = SeriesPolicy::default();
        assert!(risk_diff_eb(0.0, 0.5, &cfg(3), &p).is_err());
        assert!(risk_diff_eb(1.0, 0.0, &cfg(3), &p).is_err());
        assert!(risk_diff_shrinkage(1.0, &cfg(1), &p).is_err());
    }
}
