//! Adaptive Simpson quadrature on finite intervals.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[non_exhaustive]
pub enum Scheme {
    AdaptiveSimpson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraturePolicy {
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub scheme: Scheme,
}

impl Default for QuadraturePolicy {
    fn default() -> Self {
        Self { abs_tol: 1e-9, max_subdivisions: 100_000, scheme: Scheme::AdaptiveSimpson }
    }
}

impl QuadraturePolicy {
    pub fn with_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return domain(format!("quadrature abs_tol must be positive, got {}", self.abs_tol));
        }
        if self.max_subdivisions == 0 {
            return domain("max_subdivisions must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Sum of the Richardson error estimates of the accepted panels.
    pub err_estimate: f64,
    pub evaluations: usize,
}

const INITIAL_PANELS: usize = 8;
const MAX_DEPTH: u32 = 50;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

pub fn integrate<F>(mut f: F, a: f64, b: f64, policy: &QuadraturePolicy) -> Result<Integral>
where
    F: FnMut(f64) -> f64,
{
    try_integrate(|x| Ok(f(x)), a, b, policy)
}

/// Adaptive Simpson over `[a, b]` with a fallible integrand.
///
/// The interval is first cut into a few equal panels so that narrow features
/// are not missed by the very first Simpson estimate; each panel is then
/// bisected until its two halves agree to `15 * tol`.
pub fn try_integrate<F>(mut f: F, a: f64, b: f64, policy: &QuadraturePolicy) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    policy.validate()?;
    if !(a.is_finite() && b.is_finite()) || b < a {
        return domain(format!("integration bounds must be finite with a <= b, got [{a}, {b}]"));
    }
    if a == b {
        return Ok(Integral { value: 0.0, err_estimate: 0.0, evaluations: 0 });
    }

    let mut evaluations = 0usize;
    let mut eval = |x: f64, n: &mut usize| -> Result<f64> {
        *n += 1;
        let v = f(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            domain(format!("integrand is not finite at {x}"))
        }
    };

    let width = (b - a) / INITIAL_PANELS as f64;
    let mut stack = Vec::with_capacity(64);
    let mut left = a;
    let mut f_left = eval(a, &mut evaluations)?;
    for i in 0..INITIAL_PANELS {
        let right = if i + 1 == INITIAL_PANELS { b } else { a + width * (i + 1) as f64 };
        let mid = 0.5 * (left + right);
        let fm = eval(mid, &mut evaluations)?;
        let fr = eval(right, &mut evaluations)?;
        let whole = (right - left) * (f_left + 4.0 * fm + fr) / 6.0;
        stack.push(Panel {
            a: left,
            b: right,
            fa: f_left,
            fm,
            fb: fr,
            whole,
            tol: policy.abs_tol / INITIAL_PANELS as f64,
            depth: 0,
        });
        left = right;
        f_left = fr;
    }
    // Panels are popped LIFO; reverse so the sweep runs left to right.
    stack.reverse();

    let mut value = 0.0;
    let mut err = 0.0;
    let mut subdivisions = 0usize;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = eval(lm, &mut evaluations)?;
        let frm = eval(rm, &mut evaluations)?;
        let half = 0.5 * (p.b - p.a);
        let s_left = half * (p.fa + 4.0 * flm + p.fm) / 6.0;
        let s_right = half * (p.fm + 4.0 * frm + p.fb) / 6.0;
        let delta = s_left + s_right - p.whole;
        let floor = 64.0 * f64::EPSILON * (s_left.abs() + s_right.abs());
        if delta.abs() <= 15.0 * p.tol || delta.abs() <= floor {
            value += s_left + s_right + delta / 15.0;
            err += delta.abs() / 15.0;
            continue;
        }
        subdivisions += 1;
        if subdivisions > policy.max_subdivisions || p.depth >= MAX_DEPTH {
            let pending: f64 = stack.iter().map(|q| q.whole).sum();
            return Err(Error::Quadrature {
                partial: value + s_left + s_right + pending,
                estimate: err + delta.abs(),
            });
        }
        let tol = 0.5 * p.tol;
        stack.push(Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: s_right, tol, depth: p.depth + 1 });
        stack.push(Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: s_left, tol, depth: p.depth + 1 });
    }
    Ok(Integral { value, err_estimate: err, evaluations })
}
