//! Risk of the Jeffreys predictive by two independent routes.

use super::kernel::f_shrink;
use super::{Estimate, RiskPoint};
use crate::error::{domain, Error, Result};
use crate::model::ModelConfig;
use crate::quadrature::{try_integrate, QuadraturePolicy};
use crate::special::{ln_gamma, poisson_expectation, Growth, SeriesPolicy};

fn check_lambda_vec(lambda: &[f64], cfg: &ModelConfig) -> Result<()> {
    cfg.validate()?;
    if lambda.len() != cfg.d {
        return Err(Error::Contract(format!("λ has length {} but d = {}", lambda.len(), cfg.d)));
    }
    if let Some(bad) = lambda.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
        return domain(format!("every λ_i must be finite and positive, got {bad}"));
    }
    Ok(())
}

/// |ln Γ(z + 1/2)| <= (ln 2 + ln(1+z)) (1+z) for z >= 0.
fn ln_gamma_half_growth() -> Growth {
    Growth::log(std::f64::consts::LN_2, 1.0).with_power(1.0)
}

/// Single-coordinate risk by the closed expression
/// -sλ + sλ ln((r+s)λ) + (rλ + 1/2) ln((r+s)/r)
///   - E[ln Γ(z+1/2)], z ~ Po((r+s)λ)  + E[ln Γ(x+1/2)], x ~ Po(rλ).
fn coordinate_risk_direct(lambda: f64, cfg: &ModelConfig, policy: &SeriesPolicy) -> Result<Estimate> {
    let (r, s) = (cfg.r, cfg.s);
    let p = policy.with_growth(ln_gamma_half_growth());
    let h = |z: u64| ln_gamma(z as f64 + 0.5);
    let joint = poisson_expectation(h, (r + s) * lambda, &p)?;
    let past = poisson_expectation(h, r * lambda, &p)?;
    let closed = -s * lambda + s * lambda * ((r + s) * lambda).ln() + (r * lambda + 0.5) * cfg.log_ratio();
    let value = closed - joint.value + past.value;
    let rounding = 8.0 * f64::EPSILON * (closed.abs() + joint.value.abs() + past.value.abs());
    Ok(Estimate { value, err_bound: joint.err_bound + past.err_bound + rounding })
}

/// Sums `per_coord` over the distinct entries of `lambda`.
fn sum_coordinates<F>(lambda: &[f64], mut per_coord: F) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<Estimate>,
{
    let mut seen: Vec<(u64, Estimate)> = Vec::new();
    let mut total = Estimate { value: 0.0, err_bound: 0.0 };
    for &l in lambda {
        let est = match seen.iter().find(|(bits, _)| *bits == l.to_bits()) {
            Some((_, e)) => *e,
            None => {
                let e = per_coord(l)?;
                seen.push((l.to_bits(), e));
                e
            }
        };
        total.value += est.value;
        total.err_bound += est.err_bound;
    }
    Ok(total)
}

pub fn risk_jeffreys_direct(lambda: &[f64], cfg: &ModelConfig, policy: &SeriesPolicy) -> Result<RiskPoint> {
    check_lambda_vec(lambda, cfg)?;
    let est = sum_coordinates(lambda, |l| coordinate_risk_direct(l, cfg, policy))?;
    Ok(RiskPoint::at_lambda(lambda, est))
}

/// Risk as d/2 ln((r+s)/r) - Σ_i ∫_r^{r+s} f(tλ_i)/t dt.
pub fn risk_jeffreys_integral(
    lambda: &[f64],
    cfg: &ModelConfig,
    policy: &SeriesPolicy,
    quad: &QuadraturePolicy,
) -> Result<RiskPoint> {
    check_lambda_vec(lambda, cfg)?;
    let (r, s) = (cfg.r, cfg.s);
    let per_quad = quad.with_tol(quad.abs_tol / cfg.d as f64);
    let est = sum_coordinates(lambda, |l| {
        let mut worst_series = 0.0f64;
        let integral = try_integrate(
            |t| {
                let f = f_shrink(t * l, policy)?;
                worst_series = worst_series.max(f.err_bound);
                Ok(f.value / t)
            },
            r,
            r + s,
            &per_quad,
        )?;
        Ok(Estimate {
            value: 0.5 * cfg.log_ratio() - integral.value,
            err_bound: per_quad.abs_tol + integral.err_estimate + worst_series * cfg.log_ratio(),
        })
    })?;
    Ok(RiskPoint::at_lambda(lambda, est))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_growth_certificate_holds() {
        let g = ln_gamma_half_growth();
        for z in 0..5000u64 {
            let v = ln_gamma(z as f64 + 0.5).abs();
            assert!(v <= g.envelope(z as f64), "z={z}");
        }
    }

    #[test]
    fn large_lambda_approaches_half_log_ratio() {
        let cfg = ModelConfig::new(1, 1.0, 1.0).unwrap();
        let risk = risk_jeffreys_direct(&[100.0], &cfg, &SeriesPolicy::default()).unwrap();
        assert!((risk.value - 0.5 * 2f64.ln()).abs() < 0.01);
    }

    #[test]
    fn below_theorem_bound() {
        let cfg = ModelConfig::new(3, 1.0, 2.0).unwrap();
        let risk = risk_jeffreys_direct(&[0.1, 1.0, 10.0], &cfg, &SeriesPolicy::default()).unwrap();
        assert!(risk.value + risk.err_bound < 1.56 * 3f64.ln());
        assert!(risk.value > 0.0);
    }

    #[test]
    fn small_lambda_integral_below_half_log_ratio() {
        let cfg = ModelConfig::new(1, 1.0, 1.0).unwrap();
        let risk =
            risk_jeffreys_integral(&[0.25], &cfg, &SeriesPolicy::default(), &QuadraturePolicy::default()).unwrap();
        assert!(risk.value <= 0.5 * 2f64.ln());
    }

    #[test]
    fn routes_agree() {
        let cfg = ModelConfig::new(1, 1.0, 1.0).unwrap();
        let p = SeriesPolicy::default();
        let q = QuadraturePolicy::default();
        for lambda in [0.03, 0.7, 5.0, 100.0] {
            let a = risk_jeffreys_direct(&[lambda], &cfg, &p).unwrap();
            let b = risk_jeffreys_integral(&[lambda], &cfg, &p, &q).unwrap();
            assert!((a.value - b.value).abs() < 1e-6, "λ={lambda}: {} vs {}", a.value, b.value);
        }
    }

    #[test]
    fn integral_is_scale_invariant() {
        let p = SeriesPolicy::default();
        let q = QuadraturePolicy::default();
        let base = ModelConfig::new(1, 1.0, 2.0).unwrap();
        let scaled = ModelConfig::new(1, 3.0, 6.0).unwrap();
        let a = risk_jeffreys_integral(&[1.2], &base, &p, &q).unwrap();
        let b = risk_jeffreys_integral(&[0.4], &scaled, &p, &q).unwrap();
        assert!((a.value - b.value).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_vectors() {
        let cfg = ModelConfig::new(2, 1.0, 1.0).unwrap();
        let p = SeriesPolicy::default();
        assert!(matches!(risk_jeffreys_direct(&[1.0], &cfg, &p), Err(Error::Contract(_))));
        assert!(matches!(risk_jeffreys_direct(&[1.0, 0.0], &cfg, &p), Err(Error::Domain(_))));
    }
}
