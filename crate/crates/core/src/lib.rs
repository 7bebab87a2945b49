//! Predictive densities for Poisson counts under Kullback-Leibler loss:
//! Jeffreys, fixed-gamma, empirical-Bayes and shrinkage predictives, their
//! exact risks, and numerical checks of the risk inequalities.

pub mod curve;
pub mod error;
pub mod hyper;
pub mod model;
pub mod predictive;
pub mod quadrature;
pub mod risk;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use hyper::{alpha_mle, alpha_moment, estimate, ure_argmin, ure_value, AlphaEstimate, HyperRule};
pub use model::{Counts, ModelConfig};
pub use predictive::{log_pred, pred_pmf_table, total_law, PmfTable, PredictiveFamily, TotalLaw};
pub use quadrature::{integrate, QuadraturePolicy};
pub use risk::{Estimate, RiskArg, RiskPoint};
pub use special::{log_gamma, poisson_expectation, poisson_log_pmf, Growth, SeriesPolicy};
