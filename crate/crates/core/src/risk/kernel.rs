//! f(λ) = λ E[ln((x+1/2)/λ)], x ~ Po(λ), and the derivative g of f(λ)/λ.
//!
//! The Jeffreys risk integrates (1/(2t) - f(tλ)/t) over t ∈ [r, r+s], so a
//! lower bound on f is an upper bound on the risk.

use super::Estimate;
use crate::error::{domain, Result};
use crate::special::{ln_pois, poisson_expectation, Growth, SeriesPolicy};

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        domain(format!("λ must be finite and positive, got {lambda}"))
    }
}

/// f(λ). The expectation is summed to `tail_tol / max(1, λ)` so the
/// reported error on f itself stays within `tail_tol`.
pub fn f_shrink(lambda: f64, policy: &SeriesPolicy) -> Result<Estimate> {
    check_lambda(lambda)?;
    let scale = lambda.max(1.0);
    let growth = Growth::log((0.5 / lambda).ln().abs() + std::f64::consts::LN_2, 1.0);
    let p = policy.with_tol(policy.tail_tol / scale).with_growth(growth);
    let e = poisson_expectation(|x| ((x as f64 + 0.5) / lambda).ln(), lambda, &p)?;
    Ok(Estimate { value: lambda * e.value, err_bound: lambda * e.err_bound })
}

/// The 21-term truncation Σ_{x=0}^{20} ln(x+1/2) Po(λ){x} λ - λ ln λ.
///
/// Every omitted term is positive, so this is a lower bound on f(λ) when
/// the truncated terms are not negligible.
pub fn l_truncated(lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let head: f64 = (0..=20u64).map(|x| (x as f64 + 0.5).ln() * ln_pois(x, lambda).exp()).sum();
    Ok(head * lambda - lambda * lambda.ln())
}

/// g(λ) = d/dλ [f(λ)/λ] = E[ln((x+3/2)/(x+1/2))] - 1/λ.
pub fn g_deriv(lambda: f64, policy: &SeriesPolicy) -> Result<Estimate> {
    check_lambda(lambda)?;
    let p = policy.with_growth(Growth::bounded(3f64.ln()));
    let e = poisson_expectation(|x| (1.0 / (x as f64 + 0.5)).ln_1p(), lambda, &p)?;
    Ok(Estimate { value: e.value - 1.0 / lambda, err_bound: e.err_bound })
}

/// 0.09 e^{-λ} - e^{-λ}/λ.
pub fn g_lower_bound(lambda: f64) -> f64 {
    (-lambda).exp() * (0.09 - 1.0 / lambda)
}

/// 0.06 e^{-λ} - e^{-λ}/λ + 0.26/λ³.
pub fn g_upper_bound(lambda: f64) -> f64 {
    (-lambda).exp() * (0.06 - 1.0 / lambda) + 0.26 / (lambda * lambda * lambda)
}
