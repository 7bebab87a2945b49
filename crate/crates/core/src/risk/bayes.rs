//! Bayes risk of the Jeffreys predictive under the Γ(1/2, 1/n) prior on
//! each rate, which tends to the minimax value as n grows.

use serde::{Deserialize, Serialize};

use super::kernel::f_shrink;
use crate::error::{domain, Result};
use crate::model::ModelConfig;
use crate::quadrature::{try_integrate, QuadraturePolicy};
use crate::special::SeriesPolicy;

/// Upper end of the u-range after λ = n u²; e^{-U²} is below 1e-18.
const U_MAX: f64 = 6.5;

/// Points c at which the u-axis is split (u = √(c/(t n))), so the features
/// of f near λ = 1/2..50 are never straddled by a coarse initial panel.
const SPLIT_LAMBDAS: [f64; 9] = [0.05, 0.25, 0.5, 1.0, 2.5, 5.0, 10.0, 25.0, 100.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BayesRiskGap {
    /// d/2 ln((r+s)/r) - d ∫_r^{r+s} E[f(tλ)]/t dt.
    pub left: f64,
    /// Closed-form remainder, which vanishes as n → ∞.
    pub right: f64,
    /// left + right.
    pub total: f64,
    pub err_bound: f64,
}

/// E[f(tλ)] for λ ~ Γ(1/2, scale n), written as (2/√π) ∫_0^∞ f(t n u²) e^{-u²} du.
fn prior_mean_f(tn: f64, policy: &SeriesPolicy, quad: &QuadraturePolicy, series_err: &mut f64) -> Result<f64> {
    let mut edges = vec![0.0];
    edges.extend(SPLIT_LAMBDAS.iter().map(|c| (c / tn).sqrt()).filter(|&u| u < U_MAX));
    edges.push(U_MAX);
    let panel = quad.with_tol(quad.abs_tol / (edges.len() - 1) as f64);
    let mut total = 0.0;
    for w in edges.windows(2) {
        let part = try_integrate(
            |u| {
                if u == 0.0 {
                    return Ok(0.0);
                }
                let f = f_shrink(tn * u * u, policy)?;
                *series_err = series_err.max(f.err_bound);
                Ok(f.value * (-u * u).exp())
            },
            w[0],
            w[1],
            &panel,
        )?;
        total += part.value;
    }
    Ok(total * std::f64::consts::FRAC_2_SQRT_PI)
}

pub fn bayes_risk_gap(n: f64, cfg: &ModelConfig, policy: &SeriesPolicy, quad: &QuadraturePolicy) -> Result<BayesRiskGap> {
    cfg.validate()?;
    if !(n.is_finite() && n > 0.0) {
        return domain(format!("n must be finite and positive, got {n}"));
    }
    let (r, s) = (cfg.r, cfg.s);
    let d = cfg.d as f64;
    let c = cfg.half_d();
    let inner_quad = quad.with_tol(quad.abs_tol / (s / r).ln_1p().max(1.0));
    let mut series_err = 0.0f64;
    let outer = try_integrate(
        |t| Ok(prior_mean_f(t * n, policy, &inner_quad, &mut series_err)? / t),
        r,
        r + s,
        quad,
    )?;
    let left = c * cfg.log_ratio() - d * outer.value;
    let right = -(r * c * n + c) * (1.0 / (n * r)).ln_1p() + ((r + s) * c * n + c) * (1.0 / (n * (r + s))).ln_1p();
    let err_bound = d * (quad.abs_tol + outer.err_estimate + (inner_quad.abs_tol + series_err) * cfg.log_ratio());
    Ok(BayesRiskGap { left, right, total: left + right, err_bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_term_vanishes() {
        let cfg = ModelConfig::new(1, 1.0, 1.0).unwrap();
        let p = SeriesPolicy::default();
        let q = QuadraturePolicy::default().with_tol(1e-7);
        let a = bayes_risk_gap(10.0, &cfg, &p, &q).unwrap();
        let b = bayes_risk_gap(1e4, &cfg, &p, &q).unwrap();
        assert!(b.right.abs() < a.right.abs());
        let target = 0.5 * 2f64.ln();
        assert!((b.total - target).abs() < (a.total - target).abs());
        for g in [a, b] {
            assert!(g.total <= 1.04 * target);
        }
    }
}
