//! Predictive distributions for `y` given `x`, carried in log space.
//!
//! All four families share the per-coordinate factor
//! `Π Γ(x_i + y_i + 1/2) / (Γ(x_i + 1/2) y_i!)`; they differ only in terms
//! that depend on the totals `X = Σx` and `Y = Σy`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{domain, Error, Result};
use crate::hyper::{self, HyperRule};
use crate::model::{Counts, ModelConfig};
use crate::special::{ln_gamma, CompensatedSum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PredictiveFamily {
    /// Bayes predictive under Π λ_i^{-1/2}.
    Jeffreys,
    /// Bayes predictive under the Γ(1/2, α) prior with α fixed; α = 0 is the
    /// Jeffreys limit.
    FixedGamma { alpha: f64 },
    /// Gamma-prior predictive with α estimated from `x`.
    EmpiricalBayes { rule: HyperRule },
    /// Bayes predictive under (Σλ_i)^{1-d/2} Π λ_i^{-1/2}; needs d >= 2.
    Shrinkage,
}

impl PredictiveFamily {
    pub fn name(&self) -> &'static str {
        match self {
            PredictiveFamily::Jeffreys => "jeffreys",
            PredictiveFamily::FixedGamma { .. } => "gamma",
            PredictiveFamily::EmpiricalBayes { .. } => "eb",
            PredictiveFamily::Shrinkage => "shrinkage",
        }
    }

    pub fn validate(&self, cfg: &ModelConfig) -> Result<()> {
        match *self {
            PredictiveFamily::FixedGamma { alpha } if !(alpha.is_finite() && alpha >= 0.0) => {
                domain(format!("gamma prior rate must be non-negative, got {alpha}"))
            }
            PredictiveFamily::Shrinkage if cfg.d < 2 => domain("the shrinkage prior requires d >= 2"),
            _ => Ok(()),
        }
    }
}

fn conform(x: &Counts, y: &Counts, cfg: &ModelConfig) -> Result<()> {
    cfg.validate()?;
    x.conform(cfg)?;
    y.conform(cfg)
}

/// Σ_i [ln Γ(x_i + y_i + 1/2) - ln Γ(x_i + 1/2) - ln Γ(y_i + 1)].
fn coordinate_terms(x: &Counts, y: &Counts) -> f64 {
    x.values()
        .iter()
        .zip(y.values())
        .map(|(&xi, &yi)| {
            let (xi, yi) = (xi as f64, yi as f64);
            ln_gamma(xi + yi + 0.5) - ln_gamma(xi + 0.5) - ln_gamma(yi + 1.0)
        })
        .sum()
}

/// Gamma-prior predictive without argument checks.
fn gamma_log_pred_raw(x: &Counts, y: &Counts, alpha: f64, cfg: &ModelConfig) -> f64 {
    let (r, s) = (cfg.r, cfg.s);
    let big_x = x.sum() as f64;
    let big_y = y.sum() as f64;
    // ln((r+α)/(r+s+α)) = -ln(1 + s/(r+α))
    let keep = -(s / (r + alpha)).ln_1p();
    let grow = s.ln() - (r + s + alpha).ln();
    let mut v = (big_x + cfg.half_d()) * keep + coordinate_terms(x, y);
    if big_y > 0.0 {
        v += big_y * grow;
    }
    v
}

pub fn jeffreys_log_pred(x: &Counts, y: &Counts, cfg: &ModelConfig) -> Result<f64> {
    conform(x, y, cfg)?;
    Ok(gamma_log_pred_raw(x, y, 0.0, cfg))
}

pub fn gamma_log_pred(x: &Counts, y: &Counts, alpha: f64, cfg: &ModelConfig) -> Result<f64> {
    conform(x, y, cfg)?;
    if !(alpha.is_finite() && alpha >= 0.0) {
        return domain(format!("gamma prior rate must be non-negative, got {alpha}"));
    }
    Ok(gamma_log_pred_raw(x, y, alpha, cfg))
}

pub fn eb_log_pred(x: &Counts, y: &Counts, rule: HyperRule, cfg: &ModelConfig) -> Result<f64> {
    conform(x, y, cfg)?;
    let est = hyper::estimate(rule, x, cfg)?;
    Ok(gamma_log_pred_raw(x, y, est.alpha, cfg))
}

/// ln p_S(y|x) - ln p_J(y|x), a function of the totals only:
/// (1 - d/2) ln(r/(r+s)) + ln Γ(X+Y+1) - ln Γ(X+1) + ln Γ(X+d/2) - ln Γ(X+Y+d/2).
pub fn shrinkage_log_ratio(sum_x: u64, sum_y: u64, cfg: &ModelConfig) -> f64 {
    let c = cfg.half_d();
    if c == 1.0 {
        return 0.0;
    }
    let (bx, by) = (sum_x as f64, sum_y as f64);
    let keep = -(cfg.s / cfg.r).ln_1p();
    (1.0 - c) * keep + ln_gamma(bx + by + 1.0) - ln_gamma(bx + 1.0) + ln_gamma(bx + c) - ln_gamma(bx + by + c)
}

/// Bayes predictive under the shrinkage prior.
///
/// Writing λ = μ w with w on the simplex, both marginals factor into a
/// Gamma integral over μ and a Dirichlet integral over w, giving
/// `p_S = p_J · (r/(r+s))^{1-d/2} · Γ(X+Y+1) Γ(X+d/2) / (Γ(X+1) Γ(X+Y+d/2))`.
pub fn shrinkage_log_pred(x: &Counts, y: &Counts, cfg: &ModelConfig) -> Result<f64> {
    conform(x, y, cfg)?;
    if cfg.d < 2 {
        return domain("the shrinkage prior requires d >= 2");
    }
    Ok(gamma_log_pred_raw(x, y, 0.0, cfg) + shrinkage_log_ratio(x.sum(), y.sum(), cfg))
}

pub fn log_pred(x: &Counts, y: &Counts, family: PredictiveFamily, cfg: &ModelConfig) -> Result<f64> {
    match family {
        PredictiveFamily::Jeffreys => jeffreys_log_pred(x, y, cfg),
        PredictiveFamily::FixedGamma { alpha } => gamma_log_pred(x, y, alpha, cfg),
        PredictiveFamily::EmpiricalBayes { rule } => eb_log_pred(x, y, rule, cfg),
        PredictiveFamily::Shrinkage => shrinkage_log_pred(x, y, cfg),
    }
}

/// Law of the future total Y = Σy under the predictive: negative binomial
/// with `shape` and success probability `p` (mass ∝ Γ(shape+n)/n! p^n).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalLaw {
    pub shape: f64,
    pub p: f64,
}

impl TotalLaw {
    pub fn log_pmf(&self, n: u64) -> f64 {
        let k = n as f64;
        let mut v = ln_gamma(self.shape + k) - ln_gamma(self.shape) - ln_gamma(k + 1.0)
            + self.shape * (-self.p).ln_1p();
        if n > 0 {
            v += k * self.p.ln();
        }
        v
    }

    /// Upper bound on P(Y > n) from the geometric decay of the mass ratio
    /// (shape + k) p / (k + 1) once it drops below one.
    pub fn tail_bound(&self, n: u64) -> f64 {
        let next = n + 1;
        let ratio = (self.shape + next as f64) * self.p / (next as f64 + 1.0);
        if ratio >= 1.0 {
            return f64::INFINITY;
        }
        self.log_pmf(next).exp() / (1.0 - ratio)
    }
}

/// Predictive law of Σy given x for `family`.
pub fn total_law(x: &Counts, family: PredictiveFamily, cfg: &ModelConfig) -> Result<TotalLaw> {
    cfg.validate()?;
    x.conform(cfg)?;
    family.validate(cfg)?;
    let big_x = x.sum() as f64;
    let gamma_law = |alpha: f64| TotalLaw { shape: big_x + cfg.half_d(), p: cfg.s / (cfg.r + cfg.s + alpha) };
    Ok(match family {
        PredictiveFamily::Jeffreys => gamma_law(0.0),
        PredictiveFamily::FixedGamma { alpha } => gamma_law(alpha),
        PredictiveFamily::EmpiricalBayes { rule } => gamma_law(hyper::estimate(rule, x, cfg)?.alpha),
        PredictiveFamily::Shrinkage => TotalLaw { shape: big_x + 1.0, p: cfg.s / (cfg.r + cfg.s) },
    })
}

/// Calls `visit` on every length-`d` vector with total `n`, in lexicographic order.
pub fn for_each_composition<F: FnMut(&[u64])>(n: u64, d: usize, mut visit: F) {
    if d == 0 {
        return;
    }
    let mut v = vec![0u64; d];
    v[d - 1] = n;
    loop {
        visit(&v);
        // Next composition in lexicographic order: find the rightmost
        // position i < d-1 that can be incremented by borrowing from the tail.
        let tail: u64 = v[d - 1];
        if d == 1 {
            return;
        }
        let mut i = d - 2;
        if tail > 0 {
            v[i] += 1;
            v[d - 1] = tail - 1;
            continue;
        }
        // tail is zero: carry leftwards
        loop {
            if v[i] > 0 {
                break;
            }
            if i == 0 {
                return;
            }
            i -= 1;
        }
        if i == 0 {
            return;
        }
        let moved = v[i];
        v[i] = 0;
        v[i - 1] += 1;
        v[d - 1] = moved - 1;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PmfTable {
    /// (y, probability), sorted by probability descending.
    pub entries: Vec<(Counts, f64)>,
    /// Total mass of the listed entries.
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableError {
    #[error(transparent)]
    Model(#[from] Error),
    #[error("enumeration cap reached after {} entries with mass {}", .partial.entries.len(), .partial.mass)]
    Truncated { partial: PmfTable },
}

pub const MAX_TABLE_ENTRIES: usize = 2_000_000;

pub fn pred_pmf_table(
    x: &Counts,
    family: PredictiveFamily,
    cfg: &ModelConfig,
    mass_tol: f64,
) -> std::result::Result<PmfTable, TableError> {
    pred_pmf_table_capped(x, family, cfg, mass_tol, MAX_TABLE_ENTRIES)
}

/// Enumerates y by total-count shells (Σy = 0, 1, ...) and lexicographically
/// within a shell until the listed mass reaches `1 - mass_tol`.
pub fn pred_pmf_table_capped(
    x: &Counts,
    family: PredictiveFamily,
    cfg: &ModelConfig,
    mass_tol: f64,
    max_entries: usize,
) -> std::result::Result<PmfTable, TableError> {
    if !(mass_tol > 0.0 && mass_tol < 1.0) {
        return Err(Error::Domain(format!("mass_tol must lie in (0, 1), got {mass_tol}")).into());
    }
    cfg.validate()?;
    x.conform(cfg)?;
    family.validate(cfg)?;
    // Resolve α once; it depends on x only.
    let alpha = match family {
        PredictiveFamily::Jeffreys => Some(0.0),
        PredictiveFamily::FixedGamma { alpha } => Some(alpha),
        PredictiveFamily::EmpiricalBayes { rule } => Some(hyper::estimate(rule, x, cfg)?.alpha),
        PredictiveFamily::Shrinkage => None,
    };
    let target = 1.0 - mass_tol;
    let mut entries = Vec::new();
    let mut mass = CompensatedSum::default();
    let mut done = false;
    let mut capped = false;
    let mut n = 0u64;
    while !done && !capped {
        for_each_composition(n, cfg.d, |yv| {
            if done || capped {
                return;
            }
            let y = Counts::new(yv.to_vec());
            let lp = match alpha {
                Some(a) => gamma_log_pred_raw(x, &y, a, cfg),
                None => gamma_log_pred_raw(x, &y, 0.0, cfg) + shrinkage_log_ratio(x.sum(), y.sum(), cfg),
            };
            let p = lp.exp();
            mass.add(p);
            entries.push((y, p));
            if mass.value() >= target {
                done = true;
            } else if entries.len() >= max_entries {
                capped = true;
            }
        });
        n += 1;
    }
    let mut table = PmfTable { entries, mass: mass.value() };
    table.entries.sort_by(|a, b| b.1.total_cmp(&a.1));
    if done {
        Ok(table)
    } else {
        Err(TableError::Truncated { partial: table })
    }
}
