//! Theorem-level checks: the 0.52 bound on the Jeffreys risk, convergence of
//! the Bayes risk to the minimax value, and dominance of the EB predictive.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CheckResult, Observation};
use crate::curve::log_space;
use crate::hyper::moment_dominates;
use crate::model::ModelConfig;
use crate::quadrature::QuadraturePolicy;
use crate::risk::{bayes_risk_gap, risk_diff_eb, risk_jeffreys_direct, Estimate};
use crate::special::SeriesPolicy;

/// (r, s) pairs swept by the default grids.
pub const RS_GRID: [(f64, f64); 3] = [(1.0, 1.0), (2.0, 1.0), (1.0, 3.0)];

/// Upper bound on -min f. Since f >= -F_FLOOR, the integral form of the
/// risk gives R_J <= (0.5 + F_FLOOR) d ln((r+s)/r).
const F_FLOOR: f64 = 0.0115;

fn per_coordinate_rates() -> Vec<f64> {
    let mut rates = log_space(0.01, 100.0, 41).expect("valid grid");
    rates.extend([0.5, 1.0, 3.0, 4.0, 5.0, 7.0]);
    rates.sort_by(f64::total_cmp);
    rates.dedup();
    rates
}

/// Rate vectors for the 0.52 bound: for each (r, s) and d ∈ {1, 3, 8}, the
/// equal vectors over a 47-point rate grid, every triple from an 8-point
/// subset (d = 3), and 64 seeded random vectors (d = 8).
pub fn default_theorem1_vectors(seed: u64) -> Vec<(ModelConfig, Vec<f64>)> {
    let rates = per_coordinate_rates();
    let subset = [0.01, 0.1, 0.5, 1.0, 3.0, 5.0, 10.0, 100.0];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut out = Vec::new();
    for (r, s) in RS_GRID {
        for d in [1usize, 3, 8] {
            let cfg = ModelConfig::new(d, r, s).expect("valid configuration");
            out.extend(rates.iter().map(|&l| (cfg, vec![l; d])));
            if d == 3 {
                for &a in &subset {
                    for &b in &subset {
                        for &c in &subset {
                            if !(a == b && b == c) {
                                out.push((cfg, vec![a, b, c]));
                            }
                        }
                    }
                }
            }
            if d == 8 {
                for _ in 0..64 {
                    out.push((cfg, (0..8).map(|_| rates[rng.gen_range(0..rates.len())]).collect()));
                }
            }
        }
    }
    out
}

/// 0 < R_J(λ) < 0.52 d ln((r+s)/r), and the sharper consequence of the
/// minimum of f, R_J(λ) <= (0.5 + max(0, -min f)) d ln((r+s)/r), at every
/// vector. Coordinates are (d, r, s, λ_1, ..., λ_d).
pub fn check_theorem1(vectors: &[(ModelConfig, Vec<f64>)], policy: &SeriesPolicy) -> CheckResult {
    const NAME: &str = "theorem1";
    let key = |r: f64, s: f64, l: f64| (r.to_bits(), s.to_bits(), l.to_bits());
    let mut unique: Vec<(f64, f64, f64)> = Vec::new();
    let mut seen = HashMap::new();
    for (cfg, lambda) in vectors {
        for &l in lambda {
            if seen.insert(key(cfg.r, cfg.s, l), ()).is_none() {
                unique.push((cfg.r, cfg.s, l));
            }
        }
    }
    let computed: Vec<crate::Result<Estimate>> = unique
        .par_iter()
        .map(|&(r, s, l)| {
            let one = ModelConfig::new(1, r, s)?;
            risk_jeffreys_direct(&[l], &one, policy).map(|p| p.estimate())
        })
        .collect();
    let mut cache = HashMap::new();
    for (&(r, s, l), c) in unique.iter().zip(computed) {
        match c {
            Ok(e) => {
                cache.insert(key(r, s, l), e);
            }
            Err(e) => return CheckResult::failed(NAME, vectors.len(), vec![1.0, r, s, l], e.to_string()),
        }
    }
    let mut obs = Vec::with_capacity(3 * vectors.len());
    for (cfg, lambda) in vectors {
        let (mut risk, mut err) = (0.0, 0.0);
        for &l in lambda {
            let e = cache[&key(cfg.r, cfg.s, l)];
            risk += e.value;
            err += e.err_bound;
        }
        let scale = cfg.d as f64 * cfg.log_ratio();
        let mut point = vec![cfg.d as f64, cfg.r, cfg.s];
        point.extend(lambda);
        let rounding = 4.0 * f64::EPSILON * scale;
        obs.push(Observation::new(point.clone(), 0.52 * scale - risk, err + rounding));
        obs.push(Observation::new(point.clone(), risk, err));
        obs.push(Observation::new(point, (0.5 + F_FLOOR) * scale - risk, err + rounding));
    }
    let note = format!("{} rate vectors over (r,s) ∈ {:?}, d ∈ {{1,3,8}}", vectors.len(), RS_GRID);
    CheckResult::from_observations(NAME, &obs, note)
}

/// |total(n) - d/2 ln((r+s)/r)| strictly decreasing along `n_grid`, final gap
/// below a tenth of the first, |right(n)| shrinking, and total(n) below the
/// 0.52 bound.
pub fn check_theorem2(
    n_grid: &[f64],
    d: usize,
    r: f64,
    s: f64,
    policy: &SeriesPolicy,
    quad: &QuadraturePolicy,
) -> CheckResult {
    const NAME: &str = "theorem2";
    let cfg = match ModelConfig::new(d, r, s) {
        Ok(c) => c,
        Err(e) => return CheckResult::failed(NAME, n_grid.len(), vec![], e.to_string()),
    };
    let gaps: crate::Result<Vec<_>> = n_grid.par_iter().map(|&n| bayes_risk_gap(n, &cfg, policy, quad)).collect();
    let gaps = match gaps {
        Ok(g) => g,
        Err(e) => return CheckResult::failed(NAME, n_grid.len(), vec![], e.to_string()),
    };
    let target = cfg.minimax_bound();
    let dist: Vec<f64> = gaps.iter().map(|g| (g.total - target).abs()).collect();
    let mut obs = Vec::new();
    for k in 1..gaps.len() {
        obs.push(Observation::new(
            vec![n_grid[k - 1], n_grid[k]],
            dist[k - 1] - dist[k],
            gaps[k - 1].err_bound + gaps[k].err_bound,
        ));
    }
    if let (Some(first), Some(last)) = (gaps.first(), gaps.last()) {
        let (n0, n1) = (n_grid[0], n_grid[n_grid.len() - 1]);
        obs.push(Observation::new(vec![n0, n1], dist[0] / 10.0 - dist[dist.len() - 1], first.err_bound + last.err_bound));
        obs.push(Observation::new(vec![n0, n1], first.right.abs() - last.right.abs(), 0.0));
    }
    for (g, &n) in gaps.iter().zip(n_grid) {
        obs.push(Observation::new(vec![n], 1.04 * target - g.total, g.err_bound));
    }
    let gap_text: Vec<String> = dist.iter().map(|g| format!("{g:.4e}")).collect();
    let note = format!("d={d}, r={r}, s={s}; |total - minimax| = [{}]", gap_text.join(", "));
    CheckResult::from_observations(NAME, &obs, note)
}

/// One (d, b, r, s) configuration for the dominance check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremCase {
    pub d: usize,
    pub b: f64,
    pub r: f64,
    pub s: f64,
}

/// d ∈ {3, 8}, b ∈ {d/2 - 1, d - 2} over the (r, s) grid; with
/// `outside_range`, the single case d = 3, b = 3 for which dominance is not
/// guaranteed.
pub fn theorem3_cases(outside_range: bool) -> Vec<TheoremCase> {
    if outside_range {
        return vec![TheoremCase { d: 3, b: 3.0, r: 1.0, s: 1.0 }];
    }
    let mut cases = Vec::new();
    for (r, s) in RS_GRID {
        for d in [3usize, 8] {
            let natural = 0.5 * d as f64 - 1.0;
            let widest = d as f64 - 2.0;
            cases.push(TheoremCase { d, b: natural, r, s });
            if widest != natural {
                cases.push(TheoremCase { d, b: widest, r, s });
            }
        }
    }
    cases
}

/// risk_diff_eb(μ) > err_bound at 60 log-spaced μ on [0.1, 50] for every
/// case. Coordinates are (d, b, r, s, μ). Cases outside 0 < b <= d - 2 make
/// the check informational.
pub fn check_theorem3(name: &str, cases: &[TheoremCase], policy: &SeriesPolicy) -> CheckResult {
    let grid = log_space(0.1, 50.0, 60).expect("valid grid");
    let points: Vec<(TheoremCase, f64)> = cases.iter().flat_map(|c| grid.iter().map(move |&mu| (*c, mu))).collect();
    let mut result = CheckResult::sweep(
        name,
        &points,
        |(c, mu)| vec![c.d as f64, c.b, c.r, c.s, *mu],
        |(c, mu)| {
            let cfg = ModelConfig::new(c.d, c.r, c.s)?;
            let p = risk_diff_eb(*mu, c.b, &cfg, policy)?;
            Ok((p.value, p.err_bound))
        },
        "60 log-spaced μ on [0.1, 50]",
    );
    if cases.iter().any(|c| !moment_dominates(c.b, c.d)) {
        result.informational = true;
        result.note = format!("no guarantee: b outside 0 < b <= d-2; {}", result.note);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem1_examples() {
        let p = SeriesPolicy::default();
        let cfg = ModelConfig::new(1, 1.0, 1.0).unwrap();
        let r = check_theorem1(&[(cfg, vec![5.0])], &p);
        assert!(r.passed, "{r:?}");
        let cfg = ModelConfig::new(3, 1.0, 2.0).unwrap();
        let r = check_theorem1(&[(cfg, vec![0.1, 1.0, 10.0])], &p);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn theorem3_cases_are_in_range() {
        assert!(theorem3_cases(false).iter().all(|c| moment_dominates(c.b, c.d)));
        assert!(theorem3_cases(true).iter().all(|c| !moment_dominates(c.b, c.d)));
    }

    #[test]
    fn outside_range_is_labeled() {
        let r = check_theorem3("theorem3.no_guarantee", &theorem3_cases(true), &SeriesPolicy::default());
        assert!(r.informational);
        assert!(r.note.starts_with("no guarantee"));
    }

    #[test]
    fn default_vectors_have_matching_lengths() {
        let v = default_theorem1_vectors(42);
        assert!(v.iter().all(|(cfg, l)| l.len() == cfg.d));
        assert_eq!(v, default_theorem1_vectors(42));
    }
}
