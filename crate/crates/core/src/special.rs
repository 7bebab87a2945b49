//! Special functions and certified summation of Poisson-weighted series.
//!
//! Every expectation of the form `E[h(x)]`, `x ~ Po(m)`, in this crate goes
//! through [`poisson_expectation`]. The summand must come with a growth
//! certificate `|h(x)| <= (A + B ln(1+x)) (1+x)^p`; the certificate is what
//! turns the geometric decay of the Poisson weights into a rigorous bound on
//! the discarded tail.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub(crate) const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Taylor coefficients of ln Γ(1+ε): c[0] = -γ, c[k-1] = (-1)^k ζ(k)/k.
const LN_GAMMA_1P: [f64; 30] = [
    -0.577_215_664_901_532_860_6,
    0.822_467_033_424_113_218_2,
    -0.400_685_634_386_531_428_5,
    0.270_580_808_427_784_547_9,
    -0.207_385_551_028_673_985_3,
    0.169_557_176_997_408_190_0,
    -0.144_049_896_768_846_118_1,
    0.125_509_669_524_743_042_4,
    -0.111_334_265_869_564_690_5,
    0.100_099_457_512_781_808_5,
    -0.090_954_017_145_829_042_23,
    0.083_353_840_546_109_004_03,
    -0.076_932_516_411_352_191_47,
    0.071_432_946_295_361_336_06,
    -0.066_668_705_882_420_468_03,
    0.062_500_955_141_213_040_74,
    -0.058_823_978_658_684_582_34,
    0.055_555_767_627_403_611_10,
    -0.052_631_679_379_616_660_73,
    0.050_000_047_698_101_693_64,
    -0.047_619_070_330_142_227_99,
    0.045_454_556_293_204_669_44,
    -0.043_478_266_053_040_259_36,
    0.041_666_669_150_341_210_47,
    -0.040_000_001_192_140_140_59,
    0.038_461_539_034_675_185_71,
    -0.037_037_037_312_989_325_55,
    0.035_714_285_847_333_358_03,
    -0.034_482_758_684_919_300_81,
    0.033_333_333_364_377_581_08,
];

/// ln(n!) - (n + 1/2) ln n + n - ln(2π)/2 for n = 1..=15.
const STIRLERR: [f64; 15] = [
    0.081_061_466_795_327_258_22,
    0.041_340_695_955_409_294_09,
    0.027_677_925_684_998_339_15,
    0.020_790_672_103_765_093_11,
    0.016_644_691_189_821_192_16,
    0.013_876_128_823_070_748_00,
    0.011_896_709_945_891_770_10,
    0.010_411_265_261_972_096_50,
    0.009_255_462_182_712_732_918,
    0.008_330_563_433_362_871_257,
    0.007_573_675_487_951_840_795,
    0.006_942_840_107_209_529_866,
    0.006_408_994_188_004_207_068,
    0.005_951_370_112_758_847_736,
    0.005_554_733_551_962_801_371,
];

/// Natural log of the gamma function for `z > 0`.
///
/// Uses the Taylor expansion of ln Γ(1+ε) within 1/4 of the roots at 1 and 2
/// (so the result keeps full relative accuracy there) and the Stirling series
/// after shifting the argument to at least 10 elsewhere.
pub fn log_gamma(z: f64) -> Result<f64> {
    if !z.is_finite() || z <= 0.0 {
        return domain(format!("log_gamma requires a finite positive argument, got {z}"));
    }
    Ok(ln_gamma(z))
}

/// Unchecked [`log_gamma`]; the caller guarantees `z > 0`.
pub(crate) fn ln_gamma(z: f64) -> f64 {
    debug_assert!(z > 0.0);
    let e1 = z - 1.0;
    if e1.abs() <= 0.25 {
        return ln_gamma_1p(e1);
    }
    let e2 = z - 2.0;
    if e2.abs() <= 0.25 {
        return e2.ln_1p() + ln_gamma_1p(e2);
    }
    if z >= 10.0 {
        return stirling(z);
    }
    let mut w = z;
    let mut prod = 1.0;
    while w < 10.0 {
        prod *= w;
        w += 1.0;
    }
    stirling(w) - prod.ln()
}

fn ln_gamma_1p(eps: f64) -> f64 {
    // Horner on the series without its constant term.
    let mut acc = 0.0;
    for c in LN_GAMMA_1P.iter().rev() {
        acc = acc * eps + c;
    }
    acc * eps
}

fn stirling(z: f64) -> f64 {
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            + inv2
                * (-1.0 / 360.0
                    + inv2
                        * (1.0 / 1260.0
                            + inv2
                                * (-1.0 / 1680.0
                                    + inv2
                                        * (1.0 / 1188.0
                                            + inv2
                                                * (-691.0 / 360_360.0
                                                    + inv2 * (1.0 / 156.0 - inv2 * 3617.0 / 122_400.0)))))));
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + series
}

/// ln(n!) - (n + 1/2) ln n + n - ln(2π)/2.
fn stirlerr(n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if n <= 15 {
        return STIRLERR[n as usize - 1];
    }
    let nn = n as f64;
    let inv2 = 1.0 / (nn * nn);
    (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0)))) / nn
}

/// Deviance term x ln(x/m) + m - x, evaluated without cancellation near x = m.
fn bd0(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let v2 = v * v;
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        for j in 1..1000 {
            ej *= v2;
            let next = s + ej / (2 * j + 1) as f64;
            if next == s {
                return next;
            }
            s = next;
        }
        return s;
    }
    x * (x / m).ln() + m - x
}

/// ln Po(m){k} = k ln m - m - ln Γ(k+1).
pub fn poisson_log_pmf(k: u64, m: f64) -> Result<f64> {
    if !m.is_finite() || m <= 0.0 {
        return domain(format!("Poisson mean must be finite and positive, got {m}"));
    }
    Ok(ln_pois(k, m))
}

/// Saddle-point form of the Poisson log-mass; accurate to a few ulps of the
/// mass itself even when `k ln m` and `ln k!` are both large.
pub(crate) fn ln_pois(k: u64, m: f64) -> f64 {
    if k == 0 {
        return -m;
    }
    let x = k as f64;
    -0.5 * (std::f64::consts::TAU * x).ln() - stirlerr(k) - bd0(x, m)
}

/// Chernoff bound on ln P(X >= k) for X ~ Po(m), k > m.
pub(crate) fn ln_chernoff_upper(k: u64, m: f64) -> f64 {
    let k = k as f64;
    debug_assert!(k > m);
    -m + k * (1.0 + m.ln() - k.ln())
}

/// Chernoff bound on ln P(X <= k) for X ~ Po(m), 0 < k < m.
pub(crate) fn ln_chernoff_lower(k: u64, m: f64) -> f64 {
    if k == 0 {
        return -m;
    }
    let k = k as f64;
    debug_assert!(k < m);
    -m + k * (1.0 + m.ln() - k.ln())
}

/// Growth certificate for a summand: `|h(x)| <= (a + b ln(1+x)) (1+x)^power`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Growth {
    pub a: f64,
    pub b: f64,
    pub power: f64,
}

impl Growth {
    /// `|h| <= a`.
    pub fn bounded(a: f64) -> Self {
        Self { a, b: 0.0, power: 0.0 }
    }

    /// `|h(x)| <= a + b ln(1+x)`.
    pub fn log(a: f64, b: f64) -> Self {
        Self { a, b, power: 0.0 }
    }

    pub fn with_power(mut self, power: f64) -> Self {
        self.power = power;
        self
    }

    pub fn envelope(&self, x: f64) -> f64 {
        let base = self.a + self.b * x.ln_1p();
        if self.power == 0.0 {
            base
        } else {
            base * (1.0 + x).powf(self.power)
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if ok(self.a) && ok(self.b) && ok(self.power) {
            Ok(())
        } else {
            domain(format!("growth certificate must be finite and non-negative, got {self:?}"))
        }
    }
}

/// Truncation policy for infinite Poisson-weighted sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPolicy {
    /// Absolute budget for the discarded tails.
    pub tail_tol: f64,
    /// Hard cap on the number of summed terms.
    pub max_terms: usize,
    pub growth: Growth,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        Self { tail_tol: 1e-12, max_terms: 10_000_000, growth: Growth::bounded(1.0) }
    }
}

impl SeriesPolicy {
    pub fn new(tail_tol: f64, max_terms: usize, growth: Growth) -> Result<Self> {
        let policy = Self { tail_tol, max_terms, growth };
        policy.validate()?;
        Ok(policy)
    }

    pub fn with_tol(mut self, tail_tol: f64) -> Self {
        self.tail_tol = tail_tol;
        self
    }

    pub fn with_growth(mut self, growth: Growth) -> Self {
        self.growth = growth;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tail_tol.is_finite() && self.tail_tol > 0.0) {
            return domain(format!("tail_tol must be positive, got {}", self.tail_tol));
        }
        if self.max_terms == 0 {
            return domain("max_terms must be at least 1");
        }
        self.growth.validate()
    }
}

/// A truncated expectation with its certified residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expectation {
    pub value: f64,
    pub err_bound: f64,
    pub terms: usize,
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Relative slack charged on Σ|h w| for rounding in the weights and products.
const ROUNDING_SLACK: f64 = 32.0 * f64::EPSILON;

/// Bound on Σ_{x > k} envelope(x) Po(m){x}; infinite until the term ratio
/// m/(x+1) (inflated by the polynomial factor) drops below one.
fn right_tail_bound(k: u64, m: f64, g: &Growth) -> f64 {
    let k2 = k as f64 + 2.0;
    let rho = m / k2;
    let q = rho * (g.power / k2).exp();
    if q >= 1.0 {
        return f64::INFINITY;
    }
    let w_next = ln_pois(k + 1, m).exp();
    let base = g.a + g.b * k2.ln();
    let mut poly = 1.0;
    if g.power > 0.0 {
        poly = k2.powf(g.power);
    }
    let geometric = w_next * poly * (base / (1.0 - q) + g.b / k2 * q / ((1.0 - q) * (1.0 - q)));
    if g.b == 0.0 && g.power == 0.0 && (k + 1) as f64 > m {
        geometric.min(g.a * ln_chernoff_upper(k + 1, m).exp())
    } else {
        geometric
    }
}

/// First summation index and the bound on what is skipped below it.
fn left_start(m: f64, g: &Growth, budget: f64) -> (u64, f64) {
    if m < 30.0 {
        return (0, 0.0);
    }
    let sd = m.sqrt();
    let mut c = 8.0;
    loop {
        let x0 = (m - c * sd).floor();
        if x0 < 2.0 {
            return (0, 0.0);
        }
        let k = x0 as u64 - 1;
        let bound = ln_chernoff_lower(k, m).exp() * g.envelope(k as f64);
        if bound <= budget {
            return (x0 as u64, bound);
        }
        c += 2.0;
    }
}

/// E[h(x)] for x ~ Po(m), truncated so that the certified tail residual is at
/// most `policy.tail_tol`. The summand must satisfy `policy.growth`.
pub fn poisson_expectation<F>(h: F, m: f64, policy: &SeriesPolicy) -> Result<Expectation>
where
    F: Fn(u64) -> f64,
{
    try_poisson_expectation(|x| Ok(h(x)), m, policy)
}

/// Fallible-summand variant of [`poisson_expectation`]; the first summand
/// error aborts the sum.
pub fn try_poisson_expectation<F>(mut h: F, m: f64, policy: &SeriesPolicy) -> Result<Expectation>
where
    F: FnMut(u64) -> Result<f64>,
{
    if !m.is_finite() || m <= 0.0 {
        return domain(format!("Poisson mean must be finite and positive, got {m}"));
    }
    policy.validate()?;
    let g = policy.growth;
    let half = 0.5 * policy.tail_tol;
    let (start, left) = left_start(m, &g, half);

    let mut sum = CompensatedSum::default();
    let mut abs_sum = 0.0;
    let mut terms = 0usize;
    let mut x = start;
    loop {
        let w = ln_pois(x, m).exp();
        if w > 0.0 {
            let v = h(x)? * w;
            sum.add(v);
            abs_sum += v.abs();
        }
        terms += 1;
        let right = right_tail_bound(x, m, &g);
        if right <= half {
            return Ok(Expectation {
                value: sum.value(),
                err_bound: left + right + ROUNDING_SLACK * abs_sum,
                terms,
            });
        }
        if terms >= policy.max_terms {
            return Err(Error::Truncation { partial: sum.value(), bound: left + right, terms });
        }
        x += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_gamma_known_values() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-16);
        assert!(log_gamma(2.0).unwrap().abs() < 1e-16);
        assert_relative_eq!(log_gamma(0.5).unwrap(), 0.572_364_942_924_700_1, max_relative = 1e-14);
        assert_relative_eq!(log_gamma(5.0).unwrap(), 24f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(log_gamma(171.0).unwrap(), 706.573_062_245_787_4, max_relative = 1e-14);
    }

    #[test]
    fn log_gamma_rejects_bad_input() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
        assert!(log_gamma(f64::INFINITY).is_err());
    }

    #[test]
    fn log_gamma_recurrence() {
        let mut z = 0.5;
        while z <= 100.0 {
            let lhs = ln_gamma(z + 1.0) - ln_gamma(z);
            let rhs = z.ln();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0), "z={z}: {lhs} vs {rhs}");
            z += 0.137;
        }
    }

    #[test]
    fn log_gamma_near_roots_keeps_relative_accuracy() {
        // ln Γ(1+ε) ≈ -γε for tiny ε
        let eps = 1e-9;
        assert_relative_eq!(ln_gamma(1.0 + eps), -0.577_215_664_901_532_9 * eps, max_relative = 1e-6);
        // ln Γ(2+ε) ≈ (1-γ)ε
        assert_relative_eq!(ln_gamma(2.0 + eps), (1.0 - 0.577_215_664_901_532_9) * eps, max_relative = 1e-6);
    }

    #[test]
    fn pmf_examples() {
        assert_relative_eq!(poisson_log_pmf(0, 1.0).unwrap(), -1.0);
        assert_relative_eq!(poisson_log_pmf(1, 1.0).unwrap(), -1.0, max_relative = 1e-15);
        assert_relative_eq!(poisson_log_pmf(2, 3.0).unwrap(), 4.5f64.ln() - 3.0, max_relative = 1e-14);
        assert!(poisson_log_pmf(1, 0.0).is_err());
        assert!(poisson_log_pmf(1, -2.0).is_err());
    }

    #[test]
    fn pmf_matches_direct_formula() {
        for &m in &[0.3, 2.5, 17.0, 250.0] {
            for k in [0u64, 1, 3, 10, 40, 300] {
                let direct = k as f64 * f64::ln(m) - m - ln_gamma(k as f64 + 1.0);
                let lp = poisson_log_pmf(k, m).unwrap();
                assert!((lp - direct).abs() < 1e-11 * direct.abs().max(1.0), "k={k} m={m}");
            }
        }
    }

    #[test]
    fn expectation_examples() {
        let p = SeriesPolicy::default();
        let e = poisson_expectation(|_| 1.0, 7.0, &p).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12 && e.err_bound <= 1e-12);

        let p = p.with_growth(Growth::bounded(1.0).with_power(1.0));
        let e = poisson_expectation(|x| x as f64, 2.5, &p).unwrap();
        assert!((e.value - 2.5).abs() < 1e-12 && e.err_bound <= 1e-12);

        let p = p.with_growth(Growth::bounded(1.0));
        let e = poisson_expectation(|x| 1.0 / (x as f64 + 1.0), 2.0, &p).unwrap();
        let expect = (1.0 - (-2.0f64).exp()) / 2.0;
        assert!((e.value - expect).abs() < 1e-12 && e.err_bound <= 1e-12);
    }

    #[test]
    fn expectation_truncation_error_carries_partial() {
        let p = SeriesPolicy::new(1e-12, 5, Growth::bounded(1.0)).unwrap();
        match poisson_expectation(|_| 1.0, 50.0, &p) {
            Err(Error::Truncation { terms, bound, .. }) => {
                assert_eq!(terms, 5);
                assert!(bound > 1e-12);
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn policy_validation() {
        assert!(SeriesPolicy::new(0.0, 10, Growth::bounded(1.0)).is_err());
        assert!(SeriesPolicy::new(1e-9, 0, Growth::bounded(1.0)).is_err());
        assert!(SeriesPolicy::new(1e-9, 10, Growth::log(-1.0, 0.0)).is_err());
    }

    #[test]
    fn left_skip_is_accounted_for() {
        let p = SeriesPolicy::default();
        let e = poisson_expectation(|_| 1.0, 5000.0, &p).unwrap();
        assert!((e.value - 1.0).abs() <= 1e-12);
        assert!(e.terms < 2000, "large means should not start the sum at zero ({} terms)", e.terms);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..10_000 {
            s.add(1e-16);
        }
        assert_relative_eq!(s.value(), 1.0 + 1e-12, max_relative = 1e-15);
    }
}
