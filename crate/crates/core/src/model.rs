//! Sampling model: `x ~ Po(r λ)` observed, `y ~ Po(s λ)` to be predicted,
//! both with `d` independent coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub d: usize,
    pub r: f64,
    pub s: f64,
}

impl ModelConfig {
    pub fn new(d: usize, r: f64, s: f64) -> Result<Self> {
        let cfg = Self { d, r, s };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return domain("dimension d must be at least 1");
        }
        if !(self.r.is_finite() && self.r > 0.0) {
            return domain(format!("r must be finite and positive, got {}", self.r));
        }
        if !(self.s.is_finite() && self.s > 0.0) {
            return domain(format!("s must be finite and positive, got {}", self.s));
        }
        Ok(())
    }

    pub fn half_d(&self) -> f64 {
        0.5 * self.d as f64
    }

    /// ln((r+s)/r), the unit in which all risk bounds are stated.
    pub fn log_ratio(&self) -> f64 {
        (self.s / self.r).ln_1p()
    }

    /// Minimax lower bound 0.5 d ln((r+s)/r).
    pub fn minimax_bound(&self) -> f64 {
        self.half_d() * self.log_ratio()
    }
}

/// A vector of non-negative counts with its cached total.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Counts {
    values: Vec<u64>,
    sum: u64,
}

impl Counts {
    pub fn new(values: Vec<u64>) -> Self {
        let sum = values.iter().sum();
        Self { values, sum }
    }

    pub fn zeros(d: usize) -> Self {
        Self { values: vec![0; d], sum: 0 }
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn sum(&self) -> u64 {
        self.sum
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn conform(&self, cfg: &ModelConfig) -> Result<()> {
        if self.values.len() != cfg.d {
            return Err(Error::Contract(format!(
                "count vector has length {} but the model has d = {}",
                self.values.len(),
                cfg.d
            )));
        }
        Ok(())
    }
}

impl From<Vec<u64>> for Counts {
    fn from(values: Vec<u64>) -> Self {
        Self::new(values)
    }
}

impl<const N: usize> From<[u64; N]> for Counts {
    fn from(values: [u64; N]) -> Self {
        Self::new(values.to_vec())
    }
}
