use ebpois::hyper::{alpha_mle, alpha_moment, ure_argmin, ure_argmin_numeric, ure_value};
use ebpois::{Counts, ModelConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};

fn counts_with_sum(d: usize, total: u64) -> Counts {
    let mut v = vec![0; d];
    v[0] = total;
    Counts::new(v)
}

/// Maximizer of the marginal log-likelihood d/2 ln α - (Σx + d/2) ln(r + α)
/// on (1e-8, 1e4), found by bisecting the sign of its derivative
/// (d/2)/α - (Σx + d/2)/(r + α) in ln α. Comparing likelihood values
/// directly would only locate a flat maximum to about √ε.
fn mle_by_bisection(sum_x: u64, r: f64, d: usize) -> f64 {
    let c = 0.5 * d as f64;
    let score = |a: f64| c / a - (sum_x as f64 + c) / (r + a);
    let (mut lo, mut hi) = (1e-8f64.ln(), 1e4f64.ln());
    assert!(score(lo.exp()) > 0.0 && score(hi.exp()) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if score(mid.exp()) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

#[test]
fn mle_matches_likelihood_maximizer() {
    for (sum_x, r, d) in [(8, 1.0, 4), (1, 2.0, 3), (20, 0.5, 8), (3, 1.0, 1)] {
        let closed = alpha_mle(sum_x, r, d).unwrap();
        let numeric = mle_by_bisection(sum_x, r, d);
        assert!((closed - numeric).abs() <= 1e-8 * closed, "{sum_x},{r},{d}: {closed} vs {numeric}");
    }
}

#[test]
fn ure_minimizer_equals_mle_on_grid() {
    for d in [1usize, 3, 8] {
        for r in [0.5, 1.0, 2.0] {
            for s in [0.5, 1.0, 2.0] {
                let cfg = ModelConfig::new(d, r, s).unwrap();
                for total in 1..=20 {
                    let x = counts_with_sum(d, total);
                    let mle = alpha_mle(total, r, d).unwrap();
                    let numeric = ure_argmin_numeric(&x, &cfg).unwrap();
                    assert!((numeric - mle).abs() <= 1e-8 * mle, "d={d} r={r} s={s} Σx={total}");
                    assert!((ure_argmin(&x, &cfg).unwrap() - r * d as f64 / (2.0 * total as f64)).abs() <= 1e-12 * mle);
                }
            }
        }
    }
}

#[test]
fn ure_is_minimal_at_argmin() {
    let cfg = ModelConfig::new(4, 1.0, 1.0).unwrap();
    let x = counts_with_sum(4, 8);
    let best = ure_value(0.25, &x, &cfg).unwrap();
    for a in [0.2, 0.24, 0.26, 0.3] {
        assert!(ure_value(a, &x, &cfg).unwrap() > best);
    }
}

#[test]
fn moment_rule_is_nearly_unbiased_under_the_prior() {
    // λ_i ~ Γ(1/2, rate α), x_i ~ Po(r λ_i), d = 6, α = 1, r = 100.
    let (d, alpha, r, b) = (6usize, 1.0, 100.0, 2.0);
    let prior = Gamma::new(0.5, 1.0 / alpha).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let n = 100_000;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..n {
        let mut total = 0u64;
        for _ in 0..d {
            let lambda: f64 = prior.sample(&mut rng);
            if lambda > 0.0 {
                total += Poisson::new(r * lambda).unwrap().sample(&mut rng) as u64;
            }
        }
        let a = alpha_moment(total, r, b).unwrap();
        sum += a;
        sum_sq += a * a;
    }
    let mean = sum / n as f64;
    let se = ((sum_sq / n as f64 - mean * mean) / n as f64).sqrt();
    assert!((mean - alpha).abs() < 3.0 * se, "mean {mean} vs α {alpha}, se {se}");
}

proptest! {
    #[test]
    fn moment_rule_decreases_and_scales(k in 0u64..10_000, r in 0.01f64..100.0, b in 0.01f64..10.0, c in 0.1f64..10.0) {
        prop_assert!(alpha_moment(k + 1, r, b).unwrap() < alpha_moment(k, r, b).unwrap());
        let scaled = alpha_moment(k, c * r, b).unwrap();
        prop_assert!((scaled - c * alpha_moment(k, r, b).unwrap()).abs() <= 1e-14 * scaled);
    }
}
