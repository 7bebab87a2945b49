//! Exact Kullback-Leibler risks.
//!
//! Every routine returns a value together with an error bound that sums the
//! certified series tails and the quadrature tolerance. Comparisons against
//! a threshold should subtract `err_bound` from the margin.

use serde::{Deserialize, Serialize};

mod bayes;
mod difference;
mod jeffreys;
mod kernel;

pub use bayes::{bayes_risk_gap, BayesRiskGap};
pub use difference::{risk_diff_eb, risk_diff_eb_unreduced, risk_diff_shrinkage, risk_eb, risk_eb_at};
pub use jeffreys::{risk_jeffreys_direct, risk_jeffreys_integral};
pub use kernel::{f_shrink, g_deriv, g_lower_bound, g_upper_bound, l_truncated};

/// A value with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub err_bound: f64,
}

/// Where a risk was evaluated: at a total rate μ = Σλ_i (for quantities
/// that depend on λ only through μ) or at a full rate vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RiskArg {
    Mu(f64),
    Lambda(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskPoint {
    pub at: RiskArg,
    /// Risk or risk difference in nats.
    pub value: f64,
    pub err_bound: f64,
}

impl RiskPoint {
    pub fn at_mu(mu: f64, est: Estimate) -> Self {
        Self { at: RiskArg::Mu(mu), value: est.value, err_bound: est.err_bound }
    }

    pub fn at_lambda(lambda: &[f64], est: Estimate) -> Self {
        Self { at: RiskArg::Lambda(lambda.to_vec()), value: est.value, err_bound: est.err_bound }
    }

    pub fn estimate(&self) -> Estimate {
        Estimate { value: self.value, err_bound: self.err_bound }
    }
}
