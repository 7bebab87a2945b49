//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use ebpois::predictive::{eb_log_pred, for_each_composition, jeffreys_log_pred, log_pred, total_law};
use ebpois::{Counts, HyperRule, ModelConfig, PredictiveFamily};
use statrs::function::gamma::ln_gamma;

/// ∫_0^∞ μ^k e^{-cμ} dμ by composite Simpson on [0, (k + 80)/c].
pub fn gamma_moment_by_simpson(k: u64, c: f64) -> f64 {
    let upper = (k as f64 + 80.0) / c;
    let panels = 40_000;
    let h = upper / panels as f64;
    let f = |m: f64| if m == 0.0 { if k == 0 { 1.0 } else { 0.0 } } else { (k as f64 * m.ln() - c * m).exp() };
    let mut sum = f(0.0) + f(upper);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(i as f64 * h);
    }
    sum * h / 3.0
}

/// Shrinkage predictive pmf by direct integration: with λ = μw the prior
/// μ^{1-d/2} Π λ_i^{-1/2} splits into a Dirichlet integral over w (done in
/// closed form) and a one-dimensional integral over μ (done by quadrature).
pub fn shrinkage_pmf_oracle(x: &[u64], y: &[u64], r: f64, s: f64) -> f64 {
    let d = x.len() as f64;
    let big_x: u64 = x.iter().sum();
    let big_y: u64 = y.iter().sum();
    let dirichlet: f64 = x.iter().zip(y).map(|(&a, &b)| ln_gamma(a as f64 + b as f64 + 0.5) - ln_gamma(a as f64 + 0.5)).sum::<f64>()
        + ln_gamma(big_x as f64 + 0.5 * d)
        - ln_gamma((big_x + big_y) as f64 + 0.5 * d);
    let factorials: f64 = y.iter().map(|&b| ln_gamma(b as f64 + 1.0)).sum();
    let mu_ratio = gamma_moment_by_simpson(big_x + big_y, r + s) / gamma_moment_by_simpson(big_x, r);
    (big_y as f64 * s.ln() - factorials + dirichlet).exp() * mu_ratio
}

/// Largest count k with P(Po(m) > k) not yet below `tol`, plus one.
pub fn poisson_cutoff(m: f64, tol: f64) -> u64 {
    let mut k = 0u64;
    let mut p = (-m).exp();
    let mut cdf = p;
    while 1.0 - cdf > tol {
        k += 1;
        p *= m / k as f64;
        cdf += p;
    }
    k
}

fn poisson_pmfs(m: f64, cutoff: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(cutoff as usize + 1);
    let mut p = (-m).exp();
    out.push(p);
    for k in 1..=cutoff {
        p *= m / k as f64;
        out.push(p);
    }
    out
}

/// Product-Poisson law of a count vector, enumerated over the box
/// Π [0, cutoff_i].
fn product_support(rates: &[f64], tol: f64) -> Vec<(Vec<u64>, f64)> {
    let tables: Vec<Vec<f64>> = rates.iter().map(|&m| poisson_pmfs(m, poisson_cutoff(m, tol))).collect();
    let mut out = vec![(Vec::new(), 1.0)];
    for t in &tables {
        let mut next = Vec::with_capacity(out.len() * t.len());
        for (v, p) in &out {
            for (k, q) in t.iter().enumerate() {
                let mut w = v.clone();
                w.push(k as u64);
                next.push((w, p * q));
            }
        }
        out = next;
    }
    out
}

/// E[ln p̂_α(y|x) - ln p_J(y|x)] for the moment rule, by brute-force
/// enumeration of the full count vectors x ~ Π Po(rλ_i), y ~ Π Po(sλ_i).
pub fn eb_difference_by_enumeration(lambda: &[f64], b: f64, r: f64, s: f64) -> f64 {
    let cfg = ModelConfig::new(lambda.len(), r, s).unwrap();
    let xs = product_support(&lambda.iter().map(|l| r * l).collect::<Vec<_>>(), 1e-13);
    let ys = product_support(&lambda.iter().map(|l| s * l).collect::<Vec<_>>(), 1e-13);
    let rule = HyperRule::Moment { b };
    let mut total = 0.0;
    for (xv, px) in &xs {
        let x = Counts::new(xv.clone());
        let mut inner = 0.0;
        for (yv, py) in &ys {
            let y = Counts::new(yv.clone());
            let diff = eb_log_pred(&x, &y, rule, &cfg).unwrap() - jeffreys_log_pred(&x, &y, &cfg).unwrap();
            inner += py * diff;
        }
        total += px * inner;
    }
    total
}

/// Σ_y pmf over shells Σy ≤ N plus the certified remainder of the total
/// law; returns (enumerated mass, tail bound).
pub fn enumerated_mass(x: &Counts, family: PredictiveFamily, cfg: &ModelConfig, tail_tol: f64) -> (f64, f64) {
    let law = total_law(x, family, cfg).unwrap();
    let mut mass = 0.0;
    let mut n = 0u64;
    loop {
        let mut shell = 0.0;
        for_each_composition(n, cfg.d, |yv| {
            shell += log_pred(x, &Counts::new(yv.to_vec()), family, cfg).unwrap().exp();
        });
        mass += shell;
        let tail = law.tail_bound(n);
        if tail < tail_tol {
            return (mass, tail);
        }
        n += 1;
    }
}

/// Families exercised by the normalization checks at dimension `d`.
pub fn families(d: usize) -> Vec<PredictiveFamily> {
    let mut f = vec![
        PredictiveFamily::Jeffreys,
        PredictiveFamily::FixedGamma { alpha: 1.0 },
        PredictiveFamily::EmpiricalBayes { rule: HyperRule::Moment { b: 0.5 } },
    ];
    if d >= 2 {
        f.push(PredictiveFamily::Shrinkage);
    }
    f
}

/// Every count vector of length d with total at most `max_total`.
pub fn small_count_vectors(d: usize, max_total: u64) -> Vec<Counts> {
    let mut out = Vec::new();
    for n in 0..=max_total {
        for_each_composition(n, d, |v| out.push(Counts::new(v.to_vec())));
    }
    out
}
