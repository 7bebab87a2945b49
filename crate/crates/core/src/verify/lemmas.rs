//! Checks of the bounds on f and g and of the auxiliary inequalities used to
//! prove dominance of the empirical-Bayes predictive.

use rayon::prelude::*;

use super::{CheckResult, Observation};
use crate::curve::log_space;
use crate::risk::{f_shrink, g_deriv, g_lower_bound, g_upper_bound, l_truncated};
use crate::special::SeriesPolicy;

const EPS: f64 = f64::EPSILON;

/// Points where the case analysis of the f bound switches; each gets a fine
/// sub-grid of half-width 0.05 and step 0.001.
const CASE_BOUNDARIES: [f64; 6] = [0.5, 1.0, 3.0, 4.0, 5.0, 7.0];

/// {0.01 k : k = 1..100} ∪ {1 + 0.05 k : k = 0..1980} plus fine grids at the
/// case boundaries, sorted.
pub fn default_lemma1_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (1..=100).map(|k| 0.01 * k as f64).collect();
    grid.extend((0..=1980).map(|k| 1.0 + 0.05 * k as f64));
    for c in CASE_BOUNDARIES {
        grid.extend((-50..=50).map(|k| c + 0.001 * k as f64));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    grid
}

/// f(λ) > -0.02 everywhere on `grid`, and 0.09e^{-λ} - e^{-λ}/λ <= g(λ) <=
/// 0.06e^{-λ} - e^{-λ}/λ + 0.26/λ³ wherever λ > 1.
///
/// Observation coordinates are (λ, kind) with kind 0 for the f bound, 1 for
/// the lower g bound and 2 for the upper g bound.
pub fn check_lemma1_bounds(grid: &[f64], policy: &SeriesPolicy) -> CheckResult {
    let evaluated: Vec<_> = grid
        .par_iter()
        .map(|&l| -> crate::Result<Vec<Observation>> {
            let f = f_shrink(l, policy)?;
            let mut obs = vec![Observation::new(vec![l, 0.0], f.value + 0.02, f.err_bound)];
            if l > 1.0 {
                let g = g_deriv(l, policy)?;
                let low = g_lower_bound(l);
                let upp = g_upper_bound(l);
                obs.push(Observation::new(vec![l, 1.0], g.value - low, g.err_bound + 4.0 * EPS * low.abs()));
                obs.push(Observation::new(vec![l, 2.0], upp - g.value, g.err_bound + 4.0 * EPS * upp.abs()));
            }
            Ok(obs)
        })
        .collect();
    let mut obs = Vec::new();
    for (l, r) in grid.iter().zip(evaluated) {
        match r {
            Ok(o) => obs.extend(o),
            Err(e) => return CheckResult::failed("lemma1", grid.len(), vec![*l], e.to_string()),
        }
    }
    let (lo, hi) = (grid.iter().cloned().fold(f64::INFINITY, f64::min), grid.iter().cloned().fold(0.0, f64::max));
    let note = format!(
        "{} λ values in [{lo}, {hi}], fine sub-grids at {:?}; g bounds on λ > 1; finite grid, not a proof",
        grid.len(),
        CASE_BOUNDARIES
    );
    CheckResult::from_observations("lemma1", &obs, note)
}

/// f(3) > 0, f(4) > -0.0082, f(5) > -0.011, the 21-term truncation L(3) > 0,
/// and the minimum of f over {0.01 k : k = 1..2000} lies in
/// [-0.0115, -0.0105] at some λ in [4.5, 5.5].
pub fn check_f_minimum(policy: &SeriesPolicy) -> CheckResult {
    const NAME: &str = "lemma1.f_minimum";
    let grid: Vec<f64> = (1..=2000).map(|k| 0.01 * k as f64).collect();
    let values: crate::Result<Vec<_>> = grid.par_iter().map(|&l| f_shrink(l, policy)).collect();
    let values = match values {
        Ok(v) => v,
        Err(e) => return CheckResult::failed(NAME, grid.len(), vec![], e.to_string()),
    };
    let at = |l: f64| values[(l * 100.0).round() as usize - 1];
    let (f3, f4, f5) = (at(3.0), at(4.0), at(5.0));
    let l3 = match l_truncated(3.0) {
        Ok(v) => v,
        Err(e) => return CheckResult::failed(NAME, grid.len(), vec![3.0], e.to_string()),
    };
    let mut arg = 0;
    for (i, v) in values.iter().enumerate() {
        if v.value < values[arg].value {
            arg = i;
        }
    }
    let (lmin, fmin) = (grid[arg], values[arg]);
    let obs = vec![
        Observation::new(vec![3.0], f3.value, f3.err_bound),
        Observation::new(vec![4.0], f4.value + 0.0082, f4.err_bound),
        Observation::new(vec![5.0], f5.value + 0.011, f5.err_bound),
        Observation::new(vec![3.0, 21.0], l3, 64.0 * EPS),
        Observation::new(vec![lmin, fmin.value], fmin.value + 0.0115, fmin.err_bound),
        Observation::new(vec![lmin, fmin.value], -0.0105 - fmin.value, fmin.err_bound),
        Observation::new(vec![lmin], lmin - 4.5, 0.0),
        Observation::new(vec![lmin], 5.5 - lmin, 0.0),
    ];
    let note = format!("min f on (0,20] step 0.01 is {:.6} at λ = {lmin}", fmin.value);
    CheckResult::from_observations(NAME, &obs, note)
}

/// -(x+t+1) ln(1 - (s/(1+s)) 2t/(x+2t+1)) - s x ln(1 + (1/(1+s)) 2t/x),
/// with a bound on its rounding error.
pub fn lemma2_value(x: f64, t: f64, s: f64) -> (f64, f64) {
    let u = s / (1.0 + s) * 2.0 * t / (x + 2.0 * t + 1.0);
    let a = -(x + t + 1.0) * (-u).ln_1p();
    let v = 2.0 * t / ((1.0 + s) * x);
    let b = s * x * v.ln_1p();
    (a - b, 8.0 * EPS * (a.abs() + b.abs()))
}

pub fn check_lemma2(samples: &[[f64; 3]]) -> CheckResult {
    CheckResult::sweep(
        "lemma2",
        samples,
        |p| p.to_vec(),
        |p| Ok(lemma2_value(p[0], p[1], p[2])),
        "(x, t, s) log-uniform on [1e-3, 1e3]^3",
    )
}

/// h(y) = y ln(1 + α/y) + α²/(2(y+α)).
pub fn lemma21_h(alpha: f64, y: f64) -> f64 {
    y * (alpha / y).ln_1p() + alpha * alpha / (2.0 * (y + alpha))
}

/// h'(y) = -ln(1-w) - w - w²/2 with w = α/(y+α), and its rounding error.
/// For small w the series Σ_{k>=3} w^k/k avoids the cancellation.
pub fn lemma21_slope(alpha: f64, y: f64) -> (f64, f64) {
    let w = alpha / (y + alpha);
    if w < 0.25 {
        let mut term = w * w * w;
        let mut sum = 0.0;
        let mut k = 3.0;
        while term / k > 1e-18 * sum {
            sum += term / k;
            term *= w;
            k += 1.0;
        }
        (sum, 8.0 * EPS * sum)
    } else {
        let l = (alpha / y).ln_1p();
        let rest = w + 0.5 * w * w;
        (l - rest, 8.0 * EPS * (l + rest))
    }
}

/// h nondecreasing along each ascending grid, plus the limit
/// 0 < α - h(10^6 α) < 10^{-3} α.
pub fn check_lemma21(cases: &[(f64, Vec<f64>)]) -> CheckResult {
    let mut obs = Vec::new();
    for (alpha, ys) in cases {
        let alpha = *alpha;
        for w in ys.windows(2) {
            let (h0, h1) = (lemma21_h(alpha, w[0]), lemma21_h(alpha, w[1]));
            obs.push(Observation::new(vec![alpha, w[0], w[1]], h1 - h0, 8.0 * EPS * (h0.abs() + h1.abs())));
        }
        let far = lemma21_h(alpha, 1e6 * alpha);
        let gap = alpha - far;
        let err = 8.0 * EPS * alpha;
        obs.push(Observation::new(vec![alpha, 1e6 * alpha], gap, err));
        obs.push(Observation::new(vec![alpha, 1e6 * alpha], 1e-3 * alpha - gap, err));
    }
    CheckResult::from_observations("lemma2.1", &obs, "consecutive differences along ascending y grids")
}

/// Pointwise h'(y) > 0 at (α, y) samples.
pub fn check_lemma21_slope(samples: &[[f64; 2]]) -> CheckResult {
    CheckResult::sweep(
        "lemma2.1.slope",
        samples,
        |p| p.to_vec(),
        |p| Ok(lemma21_slope(p[0], p[1])),
        "(α, y) log-uniform on [1e-3, 1e3]^2",
    )
}

/// 200 log-spaced points on [lo, hi].
pub(crate) fn ascending(lo: f64, hi: f64) -> Vec<f64> {
    log_space(lo, hi, 200).expect("valid grid")
}

/// -s(1-s)/(x+2t+1) + ((1-s)x+t+1)/((x + 2t/(1+s)) ((x+t+1)/s + 2t/(1+s))).
pub fn lemma22_value(x: f64, t: f64, s: f64) -> (f64, f64) {
    let a = -s * (1.0 - s) / (x + 2.0 * t + 1.0);
    let q = 2.0 * t / (1.0 + s);
    let b = ((1.0 - s) * x + t + 1.0) / ((x + q) * ((x + t + 1.0) / s + q));
    (a + b, 8.0 * EPS * (a.abs() + b.abs()))
}

pub fn check_lemma22(samples: &[[f64; 3]]) -> CheckResult {
    CheckResult::sweep(
        "lemma2.2",
        samples,
        |p| p.to_vec(),
        |p| Ok(lemma22_value(p[0], p[1], p[2])),
        "(x, t) log-uniform on [1e-3, 1e3]^2, s log-uniform on [1e-3, 1]",
    )
}

/// (2/(1+s)²) t/(x+2t+1-2st/(1+s)) + (2s/(1+s)²) t/(x+t+1+2t/(1+s))
///   - ln(1 + 2t/((1+s)(x+t+1))).
///
/// With q = 2t/(1+s) and u = q/(x+t+1) the expression equals
/// q t / ((1+s)(x+1+q)(x+t+1+q)) - φ(u), φ(u) = ln(1+u) - u/(1+u),
/// which avoids the cancellation between the second term and the logarithm
/// when s is large.
pub fn lemma23_value(x: f64, t: f64, s: f64) -> (f64, f64) {
    let q = 2.0 * t / (1.0 + s);
    let d = x + t + 1.0;
    let p = q * t / ((1.0 + s) * (x + 1.0 + q) * (d + q));
    let u = q / d;
    let phi = log_minus_ratio(u);
    (p - phi, 8.0 * EPS * (p + phi))
}

/// ln(1+u) - u/(1+u) = Σ_{k>=2} (-1)^k (k-1)/k u^k for u >= 0.
fn log_minus_ratio(u: f64) -> f64 {
    if u < 0.1 {
        let mut power = u * u;
        let mut sum = 0.0;
        let mut k = 2.0;
        loop {
            let term = power * (k - 1.0) / k;
            sum += if (k as u32) % 2 == 0 { term } else { -term };
            if term <= 1e-18 * sum.abs() {
                return sum;
            }
            power *= u;
            k += 1.0;
        }
    } else {
        u.ln_1p() - u / (1.0 + u)
    }
}

pub fn check_lemma23(samples: &[[f64; 3]]) -> CheckResult {
    CheckResult::sweep(
        "lemma2.3",
        samples,
        |p| p.to_vec(),
        |p| Ok(lemma23_value(p[0], p[1], p[2])),
        "(x, t) log-uniform on [1e-3, 1e3]^2, s log-uniform on [1, 1e3]",
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma2_hand_point() {
        let (v, _) = lemma2_value(1.0, 1.0, 1.0);
        let hand = -3.0 * 0.75f64.ln() - 2f64.ln();
        assert!((v - hand).abs() < 1e-15);
        assert!((v - 0.16990).abs() < 1e-4);
        assert!(lemma2_value(100.0, 0.01, 0.5).0 > 0.0);
    }

    #[test]
    fn lemma21_slope_matches_difference_quotient() {
        for (alpha, y) in [(1.0, 0.3), (1.0, 50.0), (10.0, 2.0), (0.01, 7.0)] {
            let h = 1e-5 * y;
            let fd = (lemma21_h(alpha, y + h) - lemma21_h(alpha, y - h)) / (2.0 * h);
            let (slope, _) = lemma21_slope(alpha, y);
            assert!((fd - slope).abs() < 1e-6 * (1.0 + slope.abs()), "α={alpha} y={y}: {fd} vs {slope}");
        }
    }

    #[test]
    fn lemma22_examples() {
        assert!(lemma22_value(1.0, 1.0, 0.5).0 > 0.0);
        let (v, _) = lemma22_value(3.0, 2.0, 1.0);
        let q = 2.0;
        assert!((v - 3.0 / ((3.0 + q) * (6.0 + q))).abs() < 1e-15);
    }

    #[test]
    fn lemma23_rearrangement_matches_direct_form() {
        for (x, t, s) in [(1.0f64, 1.0f64, 1.0f64), (0.5, 5.0, 3.0), (10.0, 0.3, 20.0), (0.01, 100.0, 1.5)] {
            let q = 2.0 * t / (1.0 + s);
            let sq = (1.0 + s) * (1.0 + s);
            let direct = 2.0 / sq * t / (x + 2.0 * t + 1.0 - 2.0 * s * t / (1.0 + s))
                + 2.0 * s / sq * t / (x + t + 1.0 + q)
                - (1.0f64 + q / (x + t + 1.0)).ln();
            let (v, _) = lemma23_value(x, t, s);
            assert!((v - direct).abs() < 1e-12 * (1.0 + direct.abs()), "({x},{t},{s}): {v} vs {direct}");
        }
        for u in [1e-6, 0.05, 0.099, 0.1, 2.0] {
            let direct = (1.0f64 + u).ln() - u / (1.0 + u);
            assert!((log_minus_ratio(u) - direct).abs() < 1e-9 * direct.max(1e-300) + 1e-16);
        }
    }

    #[test]
    fn lemma23_examples() {
        assert!(lemma23_value(1.0, 1.0, 1.0).0 > 0.0);
        assert!(lemma23_value(0.5, 5.0, 3.0).0 > 0.0);
    }

    #[test]
    fn boundary_s_equal_one_agrees() {
        for (x, t) in [(0.01, 0.01), (1.0, 1.0), (5.0, 0.2), (300.0, 40.0)] {
            assert!(lemma2_value(x, t, 1.0).0 > 0.0);
            assert!(lemma22_value(x, t, 1.0).0 > 0.0);
            assert!(lemma23_value(x, t, 1.0).0 > 0.0);
        }
    }

    #[test]
    fn default_grid_covers_unit_interval_and_beyond() {
        let g = default_lemma1_grid();
        assert_eq!(g[0], 0.01);
        assert!((g[g.len() - 1] - 100.0).abs() < 1e-9);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g.iter().any(|&l| (l - 5.0).abs() < 1e-12));
    }
}
