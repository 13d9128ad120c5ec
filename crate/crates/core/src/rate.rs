//! Deviation-rate functions, their monotone conjugates `α⊛(s) = sup_{t≥0} st − α(t)`,
//! the Γ infimum, moment-based transport constants and the Bobkov-Götze check.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::measure::{McEstimate, Point, Sampler};
use crate::numeric::{golden_max, golden_min, GOLDEN_ITERATIONS};
use crate::{Error, Result};

/// Bracket growth of the numeric conjugate stops here.
pub const BRACKET_CAP: f64 = 1e12;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A convex nondecreasing rate `α : [0, ∞) → [0, ∞]` with `α(0) = 0`.
#[derive(Clone)]
pub enum RateFunction {
    /// `t² / C`.
    Quadratic { c: f64 },
    /// `¼(√(1 + 4t/C) − 1)²`, the inverse of `y ↦ C(y + √y)`.
    ModifiedBv { c: f64 },
    /// `max((√(at + 1) − 1)², 2γ(t/2 − 2 log B))`, second branch 0 for negative argument.
    GozlanLeonard { a: f64, gamma: ScalarFn, b: f64 },
    /// Piecewise linear through `(t_i, α_i)`, continued with the last slope.
    Custom { table: Vec<(f64, f64)> },
    /// `outer · inner(scale · t)`.
    Transformed {
        inner: Box<RateFunction>,
        outer: f64,
        scale: f64,
    },
}

impl fmt::Debug for RateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateFunction::Quadratic { c } => write!(f, "Quadratic {{ c: {c} }}"),
            RateFunction::ModifiedBv { c } => write!(f, "ModifiedBv {{ c: {c} }}"),
            RateFunction::GozlanLeonard { a, b, .. } => write!(f, "GozlanLeonard {{ a: {a}, b: {b} }}"),
            RateFunction::Custom { table } => write!(f, "Custom {{ {} knots }}", table.len()),
            RateFunction::Transformed { inner, outer, scale } => {
                write!(f, "{outer} * {inner:?}({scale} * t)")
            }
        }
    }
}

/// `α⊛(s)` and a maximizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugateValue {
    pub s: f64,
    pub value: f64,
    pub argmax_t: f64,
}

impl RateFunction {
    pub fn quadratic(c: f64) -> Self {
        RateFunction::Quadratic { c }
    }

    pub fn modified_bv(c: f64) -> Self {
        RateFunction::ModifiedBv { c }
    }

    /// Piecewise linear rate; the table must start at `(0, 0)` and be convex
    /// and nondecreasing.
    pub fn custom(mut table: Vec<(f64, f64)>) -> Result<Self> {
        table.sort_by(|a, b| a.0.total_cmp(&b.0));
        if table.first().map(|p| p.0 != 0.0 || p.1 != 0.0).unwrap_or(true) {
            return Err(Error::DomainError("rate table must start at (0, 0)".into()));
        }
        let mut prev_slope = 0.0;
        for w in table.windows(2) {
            let dt = w[1].0 - w[0].0;
            if !(dt > 0.0) {
                return Err(Error::DomainError("rate table abscissae must be distinct".into()));
            }
            let slope = (w[1].1 - w[0].1) / dt;
            if slope < prev_slope - 1e-12 {
                return Err(Error::DomainError("rate table is not convex nondecreasing".into()));
            }
            prev_slope = slope;
        }
        Ok(RateFunction::Custom { table })
    }

    /// `t ↦ outer · self(scale · t)`.
    pub fn transformed(self, outer: f64, scale: f64) -> Self {
        RateFunction::Transformed {
            inner: Box::new(self),
            outer,
            scale,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            RateFunction::Quadratic { c } => t * t / c,
            RateFunction::ModifiedBv { c } => {
                let u = (1.0 + 4.0 * t / c).sqrt() - 1.0;
                0.25 * u * u
            }
            RateFunction::GozlanLeonard { a, gamma, b } => {
                let u = (a * t + 1.0).sqrt() - 1.0;
                let arg = t / 2.0 - 2.0 * b.ln();
                let second = if arg > 0.0 { 2.0 * gamma(arg) } else { 0.0 };
                (u * u).max(second)
            }
            RateFunction::Custom { table } => {
                let k = table.partition_point(|p| p.0 <= t);
                let (i, j) = if k >= table.len() {
                    if table.len() < 2 {
                        return 0.0;
                    }
                    (table.len() - 2, table.len() - 1)
                } else {
                    (k - 1, k)
                };
                let (t0, a0) = table[i];
                let (t1, a1) = table[j];
                a0 + (a1 - a0) * (t - t0) / (t1 - t0)
            }
            RateFunction::Transformed { inner, outer, scale } => outer * inner.eval(scale * t),
        }
    }

    /// Smallest `t ≥ 0` with `α(t) ≥ y`.
    pub fn inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match self {
            RateFunction::Quadratic { c } => (c * y).sqrt(),
            RateFunction::ModifiedBv { c } => c * (y + y.sqrt()),
            RateFunction::Transformed { inner, outer, scale } => inner.inverse(y / outer) / scale,
            _ => {
                let mut hi = 1.0;
                while self.eval(hi) < y {
                    hi *= 2.0;
                    if hi > BRACKET_CAP {
                        return f64::INFINITY;
                    }
                }
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.eval(mid) < y {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            }
        }
    }

    /// Supremum of the slopes `s` at which `α⊛(s)` is finite.
    pub fn conjugate_domain(&self) -> f64 {
        match self {
            RateFunction::ModifiedBv { c } => 1.0 / c,
            RateFunction::Custom { table } => {
                let n = table.len();
                if n < 2 {
                    0.0
                } else {
                    (table[n - 1].1 - table[n - 2].1) / (table[n - 1].0 - table[n - 2].0)
                }
            }
            RateFunction::Transformed { inner, outer, scale } => inner.conjugate_domain() * outer * scale,
            _ => f64::INFINITY,
        }
    }
}

/// `α⊛(s)`, in closed form where the kind allows.
pub fn conjugate(alpha: &RateFunction, s: f64) -> Result<ConjugateValue> {
    if !(s >= 0.0) {
        return Err(Error::DomainError(format!("conjugate slope {s} must be nonnegative")));
    }
    if s == 0.0 {
        return Ok(ConjugateValue {
            s,
            value: 0.0,
            argmax_t: 0.0,
        });
    }
    match alpha {
        RateFunction::Quadratic { c } => Ok(ConjugateValue {
            s,
            value: c * s * s / 4.0,
            argmax_t: c * s / 2.0,
        }),
        RateFunction::ModifiedBv { c } => {
            let cs = c * s;
            if cs >= 1.0 {
                return Err(Error::Unbounded { s });
            }
            // with u = √(1 + 4t/C) the objective is ¼[Cs(u² − 1) − (u − 1)²], maximal at u = 1/(1 − Cs)
            let u = 1.0 / (1.0 - cs);
            Ok(ConjugateValue {
                s,
                value: cs * cs / (4.0 * (1.0 - cs)),
                argmax_t: c * (u * u - 1.0) / 4.0,
            })
        }
        RateFunction::Custom { table } => {
            if s > alpha.conjugate_domain() {
                return Err(Error::Unbounded { s });
            }
            let (t, v) = table
                .iter()
                .map(|&(t, a)| (t, s * t - a))
                .fold((0.0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            Ok(ConjugateValue { s, value: v, argmax_t: t })
        }
        RateFunction::Transformed { inner, outer, scale } => {
            let cv = conjugate(inner, s / (outer * scale)).map_err(|e| match e {
                Error::Unbounded { .. } => Error::Unbounded { s },
                e => e,
            })?;
            Ok(ConjugateValue {
                s,
                value: outer * cv.value,
                argmax_t: cv.argmax_t / scale,
            })
        }
        RateFunction::GozlanLeonard { .. } => conjugate_numeric(alpha, s),
    }
}

/// `α⊛(s)` by bracket doubling and golden-section search, ignoring closed forms.
pub fn conjugate_numeric(alpha: &RateFunction, s: f64) -> Result<ConjugateValue> {
    if !(s >= 0.0) {
        return Err(Error::DomainError(format!("conjugate slope {s} must be nonnegative")));
    }
    let phi = |t: f64| s * t - alpha.eval(t);
    let mut hi = 1.0;
    // concave objective: once it stops increasing the maximizer lies in [0, 2·hi]
    while phi(2.0 * hi) > phi(hi) {
        hi *= 2.0;
        if hi > BRACKET_CAP {
            return Err(Error::Unbounded { s });
        }
    }
    let (t, v) = golden_max(phi, 0.0, 2.0 * hi, GOLDEN_ITERATIONS);
    Ok(ConjugateValue {
        s,
        value: v.max(0.0),
        argmax_t: t,
    })
}

/// `Γ(N, n) = inf_{λ>0} (1/λ)[log N + n α⊛(λ/n)]`, minimized over `log λ`.
pub fn gamma(alpha: &RateFunction, log_n: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::DomainError("n must be >= 1".into()));
    }
    if !(log_n >= 0.0) {
        return Err(Error::DomainError(format!("log covering number {log_n} must be >= 0")));
    }
    let nf = n as f64;
    let objective = |log_lam: f64| -> f64 {
        let lam = log_lam.exp();
        match conjugate(alpha, lam / nf) {
            Ok(cv) => (log_n + nf * cv.value) / lam,
            Err(_) => f64::INFINITY,
        }
    };
    let s_max = alpha.conjugate_domain();
    let lo = (1e-12 * nf).ln();
    let hi = if s_max.is_finite() {
        (nf * s_max * (1.0 - 1e-12)).ln()
    } else {
        (1e12 * nf).ln()
    };
    const SCAN: usize = 600;
    let step = (hi - lo) / SCAN as f64;
    let (k, _) = (0..=SCAN)
        .map(|k| (k, objective(lo + k as f64 * step)))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let a = lo + (k as f64 - 1.0).max(0.0) * step;
    let b = lo + ((k + 1) as f64).min(SCAN as f64) * step;
    let (_, v) = golden_min(objective, a, b, GOLDEN_ITERATIONS);
    Ok(v.min(objective(lo + k as f64 * step)))
}

/// Closed form of Γ when one exists: `√(C log N / n)` for the quadratic rate.
pub fn gamma_closed_form(alpha: &RateFunction, log_n: f64, n: usize) -> Option<f64> {
    match alpha {
        RateFunction::Quadratic { c } => Some((c * log_n / n as f64).sqrt()),
        _ => None,
    }
}

/// Path-level and marginal rates of a chain with contraction `r`:
/// `α̃(t) = n α((1 − r)t/n)` and `α′(t) = α((1 − r)t)/(1 − r)`.
pub fn rate_markov_transform(alpha: &RateFunction, r: f64, n: usize) -> Result<(RateFunction, RateFunction)> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::ContractionOutOfRange(r));
    }
    let nf = n.max(1) as f64;
    let path = alpha.clone().transformed(nf, (1.0 - r) / nf);
    let marginal = alpha.clone().transformed(1.0 / (1.0 - r), 1.0 - r);
    Ok((path, marginal))
}

/// `C = (2/a)(1 + log E_{a,2})` for `α(t) = t²/C`.
pub fn t1_from_gaussian_moment(a: f64, e_a2: f64) -> f64 {
    2.0 / a * (1.0 + e_a2.ln())
}

/// `C = (2/a)(3/2 + log E_{a,1})` for `W₁(ν, μ) ≤ C(H + √H)`.
pub fn modified_t1_from_exp_moment(a: f64, e_a1: f64) -> f64 {
    2.0 / a * (1.5 + e_a1.ln())
}

pub fn gozlan_leonard_rate<G: Fn(f64) -> f64 + Send + Sync + 'static>(a: f64, gamma: G, b: f64) -> RateFunction {
    RateFunction::GozlanLeonard {
        a,
        gamma: Arc::new(gamma),
        b,
    }
}

/// Outcome of [`bobkov_gotze_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceCheck {
    /// Estimate of `∫ exp(λ(f − ∫f dμ)) dμ`.
    pub lhs: f64,
    pub stderr: f64,
    /// `exp(α⊛(λ))`.
    pub rhs: f64,
    pub pass: bool,
}

/// Monte-Carlo falsification test of `∫ e^{λ(f − ∫f dμ)} dμ ≤ e^{α⊛(λ)}`
/// for a caller-asserted 1-Lipschitz `f`. Exact for finite laws.
pub fn bobkov_gotze_check<F: Fn(&Point) -> f64>(
    sampler: &Sampler,
    f: F,
    lam: f64,
    alpha: &RateFunction,
    n_mc: usize,
) -> Result<LaplaceCheck> {
    if !(lam > 0.0) {
        return Err(Error::DomainError(format!("λ = {lam} must be positive")));
    }
    let rhs = conjugate(alpha, lam)?.value.exp();
    let (lhs, stderr) = match sampler.law.as_finite() {
        Some(m) => {
            let mean = m.integrate(&f);
            (m.integrate(|p| (lam * (f(p) - mean)).exp()), 0.0)
        }
        None => {
            let values: Vec<f64> = sampler.stream().take(n_mc.max(2)).map(|p| f(&p)).collect();
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let est = McEstimate::from_values(values.iter().map(|v| (lam * (v - mean)).exp()));
            (est.mean, est.stderr)
        }
    };
    let pass = lhs <= rhs * (1.0 + 3.0 * stderr / lhs) * (1.0 + 1e-12);
    Ok(LaplaceCheck { lhs, stderr, rhs, pass })
}

/// Inverse of `x ↦ x ln x − x + 1` on `[1, ∞)`.
pub fn sigma_inverse(y: f64) -> f64 {
    if !(y > 0.0) {
        return 1.0;
    }
    let h = |x: f64| x * (x - 1.0).ln_1p() - (x - 1.0) - y;
    let mut x = 1.0 + (2.0 * y).sqrt();
    for _ in 0..100 {
        let slope = (x - 1.0).ln_1p();
        let step = h(x) / slope;
        let mut next = x - step;
        if next <= 1.0 {
            next = 0.5 * (1.0 + x);
        }
        if (next - x).abs() <= 1e-15 * x {
            x = next;
            break;
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugate_examples() {
        let q1 = RateFunction::quadratic(1.0);
        assert_eq!(conjugate(&q1, 2.0).unwrap().value, 1.0);
        assert_eq!(conjugate(&RateFunction::quadratic(4.0), 1.0).unwrap().value, 1.0);
        assert_eq!(conjugate(&RateFunction::modified_bv(3.0), 0.0).unwrap().value, 0.0);
        let num = conjugate_numeric(&q1, 2.0).unwrap();
        assert!((num.value - 1.0).abs() < 1e-10 && (num.argmax_t - 1.0).abs() < 1e-5);
        // grid-search oracle
        let grid = (0..=400_000).map(|i| i as f64 * 1e-5).map(|t| 2.0 * t - q1.eval(t)).fold(0.0, f64::max);
        assert!((grid - 1.0).abs() < 1e-9);
    }

    #[test]
    fn modified_bv_conjugate_matches_numeric() {
        let a = RateFunction::modified_bv(2.0);
        for s in [0.05, 0.2, 0.4, 0.49] {
            let closed = conjugate(&a, s).unwrap();
            let num = conjugate_numeric(&a, s).unwrap();
            assert!((closed.value - num.value).abs() < 1e-8 * closed.value.max(1.0), "{s}");
        }
        assert!(matches!(conjugate(&a, 0.5), Err(Error::Unbounded { .. })));
        assert!(matches!(conjugate_numeric(&a, 0.6), Err(Error::Unbounded { .. })));
    }

    #[test]
    fn gamma_examples() {
        let q1 = RateFunction::quadratic(1.0);
        assert!((gamma(&q1, 1.0, 100).unwrap() - 0.1).abs() < 1e-9);
        assert!(gamma(&q1, 0.0, 100).unwrap() < 1e-6);
        let bv = RateFunction::modified_bv(1.0);
        let g = gamma(&bv, 2.0, 10_000).unwrap();
        let cap = 1.0 / ((1.0 + 10_000.0f64 / 2.0).sqrt() - 1.0);
        assert!(g <= cap && g > 0.0, "{g} vs {cap}");
    }

    #[test]
    fn markov_transform_examples() {
        let q = RateFunction::quadratic(3.0);
        let (path, marginal) = rate_markov_transform(&q, 0.0, 5).unwrap();
        for t in [0.1, 1.0, 7.0] {
            assert!((path.eval(t) - 5.0 * q.eval(t / 5.0)).abs() < 1e-14);
            assert!((marginal.eval(t) - q.eval(t)).abs() < 1e-14);
        }
        let (_, marginal) = rate_markov_transform(&q, 0.5, 5).unwrap();
        assert!((marginal.eval(2.0) - 4.0 / 6.0).abs() < 1e-14);
        let (path, _) = rate_markov_transform(&RateFunction::quadratic(1.0), 0.5, 2).unwrap();
        assert!((path.eval(2.0) - 0.5).abs() < 1e-15);
        assert!(matches!(rate_markov_transform(&q, 1.0, 2), Err(Error::ContractionOutOfRange(_))));
    }

    #[test]
    fn moment_constants() {
        assert_eq!(t1_from_gaussian_moment(1.0, 1.0), 2.0);
        assert!((t1_from_gaussian_moment(2.0, std::f64::consts::E) - 2.0).abs() < 1e-15);
        assert!((t1_from_gaussian_moment(1.0, 3f64.exp()) - 8.0).abs() < 1e-14);
        assert_eq!(modified_t1_from_exp_moment(1.0, 1.0), 3.0);
        assert!((modified_t1_from_exp_moment(3.0, 1.5f64.exp()) - 2.0).abs() < 1e-15);
        assert!((modified_t1_from_exp_moment(2.0, 2.0) - 2.193_147_180_559_945).abs() < 1e-12);
    }

    #[test]
    fn gozlan_leonard_examples() {
        assert_eq!(gozlan_leonard_rate(1.0, |u| u, 1.0).eval(0.0), 0.0);
        assert!((gozlan_leonard_rate(1.0, |_| 0.0, 1.0).eval(3.0) - 1.0).abs() < 1e-15);
        assert_eq!(gozlan_leonard_rate(1.0, |u| u, 1.0).eval(4.0), 4.0);
        // negative argument of the second branch
        assert!((gozlan_leonard_rate(1.0, |u| u, 10.0).eval(3.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_round_trips() {
        for a in [RateFunction::quadratic(2.0), RateFunction::modified_bv(0.7), gozlan_leonard_rate(2.0, |u| u * u, 1.5)] {
            for y in [0.01, 0.5, 3.0, 40.0] {
                let t = a.inverse(y);
                assert!((a.eval(t) - y).abs() < 1e-9 * y.max(1.0), "{a:?} {y}");
            }
        }
    }

    #[test]
    fn custom_rate_conjugate() {
        let a = RateFunction::custom(vec![(0.0, 0.0), (1.0, 0.5), (2.0, 2.0)]).unwrap();
        assert_eq!(a.eval(1.5), 1.25);
        let v = conjugate(&a, 1.0).unwrap();
        assert!((v.value - conjugate_numeric(&a, 1.0).unwrap().value).abs() < 1e-9);
        assert!(matches!(conjugate(&a, 2.0), Err(Error::Unbounded { .. })));
        assert!(RateFunction::custom(vec![(0.0, 0.0), (1.0, 2.0), (2.0, 2.5)]).is_err());
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_inverse(0.0), 1.0);
        assert!((sigma_inverse(1.0) - std::f64::consts::E).abs() < 1e-12);
        let y = 5.0 * 5f64.ln() - 4.0;
        assert!((sigma_inverse(y) - 5.0).abs() < 1e-9);
    }

    #[test]
    fn bobkov_gotze_examples() {
        use crate::measure::{DiscreteMeasure, Law};
        let two = Sampler::new(
            Law::Finite {
                measure: DiscreteMeasure::from_1d(&[0.0, 1.0], &[0.5, 0.5]).unwrap(),
            },
            0,
        );
        let c = bobkov_gotze_check(&two, |p| p.x(), 1.0, &RateFunction::quadratic(1.0), 10).unwrap();
        assert!((c.lhs - 0.5f64.cosh()).abs() < 1e-14 && (c.rhs - 0.25f64.exp()).abs() < 1e-14 && c.pass);
        let zero = bobkov_gotze_check(&two, |_| 0.0, 1.0, &RateFunction::quadratic(1.0), 10).unwrap();
        assert_eq!(zero.lhs, 1.0);
        let g = Sampler::new(Law::standard_gaussian(1), 11);
        let c = bobkov_gotze_check(&g, |p| p.x(), 0.5, &RateFunction::quadratic(2.0), 200_000).unwrap();
        assert!((c.rhs - 0.125f64.exp()).abs() < 1e-14);
        assert!(c.pass, "{c:?}");
    }
}
