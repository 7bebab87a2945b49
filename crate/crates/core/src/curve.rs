//! Risk-difference curves over a grid of total rates μ.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::model::ModelConfig;
use crate::risk::{risk_diff_eb, risk_diff_shrinkage};
use crate::special::SeriesPolicy;

/// `n` points spaced evenly in ln between `lo` and `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
        return domain(format!("log grid needs 0 < lo < hi, got [{lo}, {hi}]"));
    }
    if n < 2 {
        return domain(format!("log grid needs at least two points, got {n}"));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n).map(|i| (a + step * i as f64).exp()).collect();
    grid[0] = lo;
    grid[n - 1] = hi;
    Ok(grid)
}

/// Which predictive is compared against the Jeffreys predictive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Comparison {
    /// Moment-rule empirical Bayes with α = r b/(X+1).
    EbVsJeffreys { b: f64 },
    ShrinkageVsJeffreys,
}

impl Comparison {
    pub fn label(&self) -> String {
        match self {
            Comparison::EbVsJeffreys { b } => format!("eb b={b}"),
            Comparison::ShrinkageVsJeffreys => "shrinkage".to_string(),
        }
    }

    pub fn evaluate(&self, mu: f64, cfg: &ModelConfig, policy: &SeriesPolicy) -> Result<CurveRow> {
        let point = match *self {
            Comparison::EbVsJeffreys { b } => risk_diff_eb(mu, b, cfg, policy)?,
            Comparison::ShrinkageVsJeffreys => risk_diff_shrinkage(mu, cfg, policy)?,
        };
        Ok(CurveRow { mu, value: point.value, err_bound: point.err_bound })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub mu: f64,
    pub value: f64,
    pub err_bound: f64,
}

/// Risk reduction relative to the Jeffreys predictive along a μ grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskCurve {
    pub cfg: ModelConfig,
    pub comparison: Comparison,
    pub rows: Vec<CurveRow>,
}

impl RiskCurve {
    /// Evaluates every grid point in parallel; rows come back in grid order.
    pub fn compute(comparison: Comparison, grid: &[f64], cfg: &ModelConfig, policy: &SeriesPolicy) -> Result<Self> {
        cfg.validate()?;
        if grid.is_empty() || grid.windows(2).any(|w| !(w[0] < w[1])) {
            return domain("μ grid must be non-empty and strictly increasing");
        }
        let rows = grid.par_iter().map(|&mu| comparison.evaluate(mu, cfg, policy)).collect::<Result<Vec<_>>>()?;
        Ok(Self { cfg: *cfg, comparison, rows })
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(|r| r.value)
    }
}
