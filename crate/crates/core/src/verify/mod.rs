//! Numerical checks of the risk inequalities, collected into a report.
//!
//! Every check evaluates an inequality at a finite set of points and records
//! the smallest slack. A point only counts as satisfied when its slack exceeds
//! the certified numerical error at that point, so nothing passes on noise.
//! Grids are finite: a passing check is evidence on the stated grid, not a
//! proof for all arguments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;

mod lemmas;
mod theorems;

pub use lemmas::{
    check_f_minimum, check_lemma1_bounds, check_lemma2, check_lemma21, check_lemma21_slope, check_lemma22,
    check_lemma23, default_lemma1_grid, lemma21_h, lemma21_slope, lemma22_value, lemma23_value, lemma2_value,
};
pub use theorems::{
    check_theorem1, check_theorem2, check_theorem3, default_theorem1_vectors, theorem3_cases, TheoremCase,
};

/// Outcome of one inequality check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub grid_size: usize,
    /// Smallest observed slack (inequality side minus bound).
    pub min_margin: f64,
    /// Arguments at which `min_margin` was observed.
    pub worst_point: Vec<f64>,
    /// Certified numerical error at `worst_point`.
    pub numeric_error: f64,
    pub passed: bool,
    /// Informational checks (outside any proven range) do not affect the
    /// overall verdict.
    pub informational: bool,
    pub note: String,
}

/// One evaluated point: slack and its numerical error.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub point: Vec<f64>,
    pub margin: f64,
    pub err: f64,
}

impl Observation {
    pub fn new(point: Vec<f64>, margin: f64, err: f64) -> Self {
        Self { point, margin, err }
    }

    fn holds(&self) -> bool {
        self.margin.is_finite() && self.margin > self.err
    }
}

impl CheckResult {
    /// Folds observations in order; ties keep the earliest point, so the
    /// outcome does not depend on evaluation order.
    pub fn from_observations(name: &str, obs: &[Observation], note: impl Into<String>) -> Self {
        let mut worst: Option<&Observation> = None;
        for o in obs {
            let replace = match worst {
                None => true,
                Some(w) => o.margin < w.margin || (o.margin.is_nan() && !w.margin.is_nan()),
            };
            if replace {
                worst = Some(o);
            }
        }
        let passed = !obs.is_empty() && obs.iter().all(Observation::holds);
        let (min_margin, worst_point, numeric_error) = match worst {
            Some(w) => (w.margin, w.point.clone(), w.err),
            None => (f64::NAN, Vec::new(), 0.0),
        };
        Self {
            name: name.to_string(),
            grid_size: obs.len(),
            min_margin,
            worst_point,
            numeric_error,
            passed,
            informational: false,
            note: note.into(),
        }
    }

    /// A check that could not be evaluated (e.g. a series that would not
    /// truncate); recorded as failed rather than propagated.
    pub fn failed(name: &str, grid_size: usize, point: Vec<f64>, reason: String) -> Self {
        Self {
            name: name.to_string(),
            grid_size,
            min_margin: f64::NAN,
            worst_point: point,
            numeric_error: f64::NAN,
            passed: false,
            informational: false,
            note: reason,
        }
    }

    /// Evaluates `eval` on every point in parallel and folds the results in
    /// point order. An evaluation error fails the whole check.
    pub fn sweep<P, F>(name: &str, points: &[P], coords: impl Fn(&P) -> Vec<f64>, eval: F, note: &str) -> Self
    where
        P: Sync,
        F: Fn(&P) -> Result<(f64, f64)> + Sync,
    {
        let evaluated: Vec<Result<(f64, f64)>> = points.par_iter().map(&eval).collect();
        let mut obs = Vec::with_capacity(points.len());
        for (p, r) in points.iter().zip(evaluated) {
            match r {
                Ok((margin, err)) => obs.push(Observation::new(coords(p), margin, err)),
                Err(e) => return Self::failed(name, points.len(), coords(p), e.to_string()),
            }
        }
        Self::from_observations(name, &obs, note)
    }

    /// True when `name` is `family` or a member of it (`family.*`).
    pub fn in_family(&self, family: &str) -> bool {
        self.name == family || self.name.strip_prefix(family).is_some_and(|rest| rest.starts_with('.'))
    }
}

/// `n` points drawn log-uniformly from the box `ranges`, reproducible from
/// `(seed, stream)`; distinct checks use distinct streams.
pub fn log_uniform_samples<const N: usize>(seed: u64, stream: u64, n: usize, ranges: [(f64, f64); N]) -> Vec<[f64; N]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..n)
        .map(|_| {
            let mut p = [0.0; N];
            for (v, (lo, hi)) in p.iter_mut().zip(ranges) {
                *v = if lo == hi { lo } else { rng.gen_range(lo.ln()..hi.ln()).exp() };
            }
            p
        })
        .collect()
}

/// Settings for a full verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random samples per sampled inequality.
    pub samples: usize,
    pub tail_tol: f64,
    pub quad_tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: 42, samples: 100_000, tail_tol: 1e-12, quad_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub tool_version: String,
    /// Seconds since the Unix epoch; taken from `SOURCE_DATE_EPOCH` when set
    /// so that reports can be reproduced byte for byte.
    pub timestamp: u64,
    pub config: VerifyConfig,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed || c.informational)
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let verdict = match (c.passed, c.informational) {
                (true, false) => "PASS",
                (false, false) => "FAIL",
                (true, true) => "info (holds)",
                (false, true) => "info (violated)",
            };
            out.push_str(&format!(
                "{:<22} {:<16} points={:<8} min_margin={:+.6e} err={:.1e} at {:?}",
                c.name, verdict, c.grid_size, c.min_margin, c.numeric_error, c.worst_point
            ));
            if !c.note.is_empty() {
                out.push_str(&format!("  [{}]", c.note));
            }
            out.push('\n');
        }
        out.push_str(if self.passed() { "overall: PASS\n" } else { "overall: FAIL\n" });
        out
    }
}

fn report_timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|v| v.trim().parse().ok()).unwrap_or_else(|| {
        std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
    })
}

/// Names of every check produced by [`run_all`], in report order.
pub const CHECK_NAMES: [&str; 11] = [
    "lemma1",
    "lemma1.f_minimum",
    "lemma2",
    "lemma2.1",
    "lemma2.1.slope",
    "lemma2.2",
    "lemma2.3",
    "theorem1",
    "theorem2",
    "theorem3",
    "theorem3.no_guarantee",
];

/// Runs every check whose name is in one of `only` (all when empty).
pub fn run_all(config: &VerifyConfig, only: &[String]) -> VerificationReport {
    let wanted = |name: &str| {
        only.is_empty()
            || only.iter().any(|f| name == f || name.strip_prefix(f.as_str()).is_some_and(|r| r.starts_with('.')))
    };
    let policy = crate::special::SeriesPolicy::default().with_tol(config.tail_tol);
    let quad = crate::quadrature::QuadraturePolicy::default().with_tol(config.quad_tol);
    let (seed, n) = (config.seed, config.samples);
    let mut checks = Vec::new();
    for name in CHECK_NAMES.iter().filter(|n| wanted(n)) {
        let check = match *name {
            "lemma1" => check_lemma1_bounds(&default_lemma1_grid(), &policy),
            "lemma1.f_minimum" => check_f_minimum(&policy),
            "lemma2" => check_lemma2(&log_uniform_samples(seed, 2, n, [(1e-3, 1e3); 3])),
            "lemma2.1" => check_lemma21(&[(1.0, lemmas::ascending(0.1, 100.0)), (10.0, lemmas::ascending(0.01, 10.0))]),
            "lemma2.1.slope" => check_lemma21_slope(&log_uniform_samples(seed, 21, n, [(1e-3, 1e3); 2])),
            "lemma2.2" => check_lemma22(&log_uniform_samples(seed, 22, n, [(1e-3, 1e3), (1e-3, 1e3), (1e-3, 1.0)])),
            "lemma2.3" => check_lemma23(&log_uniform_samples(seed, 23, n, [(1e-3, 1e3), (1e-3, 1e3), (1.0, 1e3)])),
            "theorem1" => check_theorem1(&default_theorem1_vectors(seed), &policy),
            "theorem2" => check_theorem2(&[10.0, 1e2, 1e3, 1e4], 3, 1.0, 1.0, &policy, &quad),
            "theorem3" => check_theorem3("theorem3", &theorem3_cases(false), &policy),
            "theorem3.no_guarantee" => check_theorem3("theorem3.no_guarantee", &theorem3_cases(true), &policy),
            _ => unreachable!(),
        };
        checks.push(check);
    }
    VerificationReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: report_timestamp(),
        config: config.clone(),
        checks,
    }
}
