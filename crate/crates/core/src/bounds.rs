//! Deviation bounds for `W₁(L_n, μ)`, evaluated end to end with every
//! intermediate constant exposed in a [`BoundReport`].
//!
//! Values are carried as natural logs because covering constants overflow
//! doubles long before the bounds become informative.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::covering::{log_n_euclidean_ball, n_holder_ball, n_lipschitz_tree, theta};
use crate::numeric::ln_gamma;
use crate::rate::{gamma, sigma_inverse, RateFunction};
use crate::{Error, Result};

/// Serde adapter writing non-finite floats as `"inf"`, `"-inf"` or `"nan"`.
pub mod json_float {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    struct FloatVisitor;

    impl Visitor<'_> for FloatVisitor {
        type Value = f64;
        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
        }
        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }
        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            match v {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
            }
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(FloatVisitor)
    }

    /// The same encoding for the values of a string-keyed map.
    pub mod map {
        use serde::de::Deserializer;
        use serde::ser::{SerializeMap, Serializer};
        use serde::Deserialize;
        use std::collections::BTreeMap;

        #[derive(serde::Serialize, Deserialize)]
        struct Wrapped(#[serde(with = "super")] f64);

        pub fn serialize<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
            let mut out = s.serialize_map(Some(m.len()))?;
            for (k, v) in m {
                out.serialize_entry(k, &Wrapped(*v))?;
            }
            out.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
            let raw = BTreeMap::<String, Wrapped>::deserialize(d)?;
            Ok(raw.into_iter().map(|(k, v)| (k, v.0)).collect())
        }
    }
}

/// Intermediate flag set to 1 when a bound is evaluated outside its stated regime.
pub const REGIME_FLAG: &str = "regime_violation";

/// A bound `P(W₁(L_n, μ) ≥ t) ≤ exp(log_value)` with its constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub n: usize,
    #[serde(with = "json_float")]
    pub t: f64,
    /// Natural log of the bound; may be positive (vacuous).
    #[serde(with = "json_float")]
    pub log_value: f64,
    #[serde(with = "json_float::map")]
    pub intermediates: BTreeMap<String, f64>,
}

impl BoundReport {
    fn new(name: &str, n: usize, t: f64) -> Self {
        BoundReport {
            name: name.to_string(),
            n,
            t,
            log_value: 0.0,
            intermediates: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, v: f64) -> Self {
        self.intermediates.insert(key.to_string(), v);
        self
    }

    fn set(&mut self, key: &str, v: f64) {
        self.intermediates.insert(key.to_string(), v);
    }

    /// The bound as a probability, capped at 1.
    pub fn probability(&self) -> f64 {
        self.log_value.min(0.0).exp()
    }

    pub fn is_vacuous(&self) -> bool {
        !(self.log_value < 0.0)
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.intermediates.get(key).copied()
    }

    pub fn regime_violated(&self) -> bool {
        self.get(REGIME_FLAG) == Some(1.0)
    }

    /// `Err(RegimeViolation)` when the report was computed outside the bound's regime.
    pub fn check_regime(&self) -> Result<()> {
        if self.regime_violated() {
            Err(Error::RegimeViolation(format!("{} at n = {}, t = {}", self.name, self.n, self.t)))
        } else {
            Ok(())
        }
    }

    fn flag_regime(&mut self, violated: bool) {
        self.set(REGIME_FLAG, if violated { 1.0 } else { 0.0 });
    }
}

/// `[x log x − x + 1]^{−1}` with `x = 32/(at)`: the mass the compact set may leave out.
pub fn required_tail(a: f64, t: f64) -> Result<f64> {
    if !(a > 0.0 && t > 0.0) {
        return Err(Error::DomainError(format!("need a, t > 0, got a = {a}, t = {t}")));
    }
    let x = 32.0 / (a * t);
    if !(x > 1.0) {
        return Err(Error::DomainError(format!("32/(at) = {x} must exceed 1")));
    }
    Ok(1.0 / (x * x.ln() - x + 1.0))
}

pub type TailFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Maps `(R, ε)` to `log 𝒩(F_K, ε)` for the compact set of radius `R`.
pub type CoverRule = Arc<dyn Fn(f64, f64) -> Result<f64> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CompactKind {
    /// Euclidean ball of radius `R` in ℝ^d.
    EuclideanBall { d: usize },
    /// α-Hölder ball of radius `R` among paths started at 0, in the uniform metric.
    HolderBall { alpha: f64 },
}

/// A family of compact sets indexed by a radius `R`, with a bound on the mass outside.
#[derive(Clone)]
pub struct CompactChoice {
    pub kind: CompactKind,
    /// Nonincreasing `R ↦` upper bound on `μ(K_R^c)`.
    pub tail_bound: TailFn,
}

impl CompactChoice {
    /// Euclidean balls with the Chebyshev tail `2e^{−aR}` implied by `E_{a,1} ≤ 2`.
    pub fn euclidean_chebyshev(d: usize, a: f64) -> Self {
        CompactChoice {
            kind: CompactKind::EuclideanBall { d },
            tail_bound: Arc::new(move |r| (2.0 * (-a * r).exp()).min(1.0)),
        }
    }

    /// Hölder balls with the Markov tail `m / R` from a bound `m` on the mean Hölder norm.
    pub fn holder_markov(alpha: f64, mean_norm: f64) -> Self {
        CompactChoice {
            kind: CompactKind::HolderBall { alpha },
            tail_bound: Arc::new(move |r| if r > 0.0 { (mean_norm / r).min(1.0) } else { 1.0 }),
        }
    }

    /// Tree bound for the Lipschitz class over `K_R`, with `𝒩(K_R, ε/16)` from the
    /// ball-covering formula of the kind.
    pub fn tree_cover_rule(&self) -> CoverRule {
        let kind = self.kind;
        Arc::new(move |r, eps| {
            let log_nk = match kind {
                CompactKind::EuclideanBall { d } => log_n_euclidean_ball(r, eps / 16.0, d),
                CompactKind::HolderBall { alpha } => n_holder_ball(r, eps / 16.0, alpha)?,
            };
            Ok(n_lipschitz_tree(log_nk.exp(), r, eps))
        })
    }

    /// Smallest `R` (to bisection accuracy) whose tail bound meets `threshold`.
    pub fn radius_for(&self, threshold: f64) -> Result<f64> {
        let tail = &self.tail_bound;
        if tail(0.0) <= threshold {
            return Ok(0.0);
        }
        let mut hi = 1.0;
        while tail(hi) > threshold {
            hi *= 2.0;
            if hi > 1e15 {
                return Err(Error::DomainError(format!("no radius reaches tail {threshold}")));
            }
        }
        let mut lo = 0.0;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if tail(mid) > threshold {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }
}

/// `exp −n α[t/2 − Γ(𝒞_t, n)]` with `α = 0` below 0.
pub fn bound_main(
    alpha: &RateFunction,
    a: f64,
    compact: &CompactChoice,
    cover_rule: &CoverRule,
    t: f64,
    n: usize,
) -> Result<BoundReport> {
    let threshold = required_tail(a, t)?;
    let r = compact.radius_for(threshold)?;
    let delta = t / 8.0;
    let log_ct = cover_rule(r, delta)?;
    let g = if log_ct.is_finite() { gamma(alpha, log_ct, n)? } else { f64::INFINITY };
    let x = t / 2.0 - g;
    let mut rep = BoundReport::new("main", n, t)
        .with("a", a)
        .with("required_tail", threshold)
        .with("r_t", r)
        .with("delta", delta)
        .with("log_ct", log_ct)
        .with("gamma", g);
    rep.log_value = if x > 0.0 { -(n as f64) * alpha.eval(x) } else { 0.0 };
    Ok(rep)
}

/// `𝒞_t exp(−n t²/(8C))` for μ satisfying `T₁(C)`.
pub fn bound_t1(c: f64, log_ct: f64, t: f64, n: usize) -> BoundReport {
    let mut rep = BoundReport::new("t1", n, t).with("c", c).with("log_ct", log_ct);
    rep.log_value = log_ct - n as f64 * t * t / (8.0 * c);
    rep
}

/// `A(n, t) exp(−(√2 − 1)² n t²/(2C²))` for the modified inequality
/// `W₁(ν, μ) ≤ C(H + √H)`, with `log A = 4(√2 − 1)² n (√(1 + n/log 𝒞_t) − 1)^{−2}`.
/// Flagged outside `t ≤ C/2`.
pub fn bound_modified(c: f64, log_ct: f64, t: f64, n: usize) -> BoundReport {
    let k = (2f64.sqrt() - 1.0).powi(2);
    let nf = n as f64;
    let root = (1.0 + nf / log_ct).sqrt() - 1.0;
    let log_a = 4.0 * k * nf / (root * root);
    let exponent = -k / (2.0 * c * c) * nf * t * t;
    let mut rep = BoundReport::new("modified", n, t)
        .with("c", c)
        .with("log_ct", log_ct)
        .with("log_a", log_a)
        .with("exponent", exponent);
    rep.flag_regime(t > c / 2.0);
    rep.log_value = log_a + exponent;
    rep
}

/// Unspecified universal constants of the ℝ^d covering estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdConstants {
    pub c_d: f64,
    pub c1: f64,
    pub c2: f64,
}

impl RdConstants {
    /// `C_d = (1 + 2·32)^d`, `C₁ = C₂ = 2`.
    pub fn default_for(d: usize) -> Self {
        RdConstants {
            c_d: 65f64.powi(d as i32),
            c1: 2.0,
            c2: 2.0,
        }
    }
}

/// [`bound_t1`] with `log 𝒞_t = log 2 + log(1 + θ) + C_d θ^d log 2`, `θ = θ(1/at)`.
/// The small-`t` form `log C₁ + log(1 + u) + C_d C₂^d u^d`, `u = (1/at) log(1/at)`,
/// is reported alongside and flagged outside `t ≤ 1/(2a)`.
pub fn bound_rd(a: f64, c: f64, d: usize, t: f64, n: usize, k: &RdConstants) -> Result<BoundReport> {
    let x = 1.0 / (a * t);
    let th = theta(x)?;
    let df = d as f64;
    let log_ct = LN_2 + th.ln_1p() + k.c_d * th.powf(df) * LN_2;
    let u = x * x.ln();
    let small_t = if u >= 0.0 {
        k.c1.ln() + u.ln_1p() + k.c_d * k.c2.powf(df) * u.powf(df)
    } else {
        f64::NAN
    };
    let mut rep = bound_t1(c, log_ct, t, n);
    rep.name = "t1_rd".into();
    rep.set("a", a);
    rep.set("d", df);
    rep.set("theta", th);
    rep.set("log_ct_small_t", small_t);
    rep.set("small_t_regime", if t <= 1.0 / (2.0 * a) { 1.0 } else { 0.0 });
    rep.set("c_d", k.c_d);
    rep.set("c1", k.c1);
    rep.set("c2", k.c2);
    Ok(rep)
}

/// A finite-support approximation of μ used to instantiate `K_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub k: usize,
    pub diameter: f64,
    /// `W₁(μ, ν)`.
    pub achieved_w1: f64,
}

/// `K_t e^{−nt²/8C}` with `log K_t = k D²/C` from a witness ν with `W₁(μ, ν) ≤ t/4`.
/// The proof's sharper `k D²/(2C)` is reported as `log_kt_proof_form`.
pub fn bound_variant(c: f64, w: &Witness, t: f64, n: usize) -> Result<BoundReport> {
    if w.achieved_w1 > t / 4.0 {
        return Err(Error::WitnessTooFar {
            achieved: w.achieved_w1,
            allowed: t / 4.0,
        });
    }
    let kf = w.k as f64;
    let log_kt = kf * w.diameter * w.diameter / c;
    let mut rep = BoundReport::new("variant", n, t)
        .with("c", c)
        .with("k", kf)
        .with("diameter", w.diameter)
        .with("achieved_w1", w.achieved_w1)
        .with("log_kt", log_kt)
        .with("log_kt_proof_form", log_kt / 2.0);
    rep.log_value = log_kt - n as f64 * t * t / (8.0 * c);
    Ok(rep)
}

/// `K_t e^{−nt²/16σ²}` for a Gaussian measure on a Banach space with small-ball
/// function `ψ` and weak variance `σ`, `log log K_t = c(ψ(t/32) + log(σ/t))`.
///
/// Also reports the proof's quantities: `λ ≤ √ψ(t/16) + c√log⁺(σ/t)`,
/// `log k ≤ ψ(t/16) + ψ(t/32) + c log⁺(σ/t)` and the diameter `2σλ`. Flagged
/// unless `ψ(t/16) ≥ log 2` and `t/σ ≤ 8√(2 log 2)`.
pub fn bound_gaussian_banach<P: Fn(f64) -> f64>(psi: P, sigma: f64, t: f64, n: usize, c: f64) -> BoundReport {
    let p16 = psi(t / 16.0);
    let p32 = psi(t / 32.0);
    let log_ratio = (sigma / t).ln();
    let log_plus = log_ratio.max(0.0);
    let lambda = p16.max(0.0).sqrt() + c * log_plus.sqrt();
    let log_k = p16 + p32 + c * log_plus;
    let diameter = 2.0 * sigma * lambda;
    let log_log_kt = c * (p32 + log_ratio);
    let log_kt = log_log_kt.exp();
    let mut rep = BoundReport::new("gaussian_banach", n, t)
        .with("sigma", sigma)
        .with("c", c)
        .with("psi_t16", p16)
        .with("psi_t32", p32)
        .with("lambda", lambda)
        .with("log_k", log_k)
        .with("diameter", diameter)
        .with("log_log_kt", log_log_kt)
        .with("log_kt", log_kt);
    rep.flag_regime(!(p16 >= LN_2 && t / sigma <= 8.0 * (2.0 * LN_2).sqrt()));
    rep.log_value = log_kt - n as f64 * t * t / (16.0 * sigma * sigma);
    rep
}

/// `E W₁(L_n, μ) ≤ 2δ + (8/a)/σ(1/μ(K^c)) + Γ(𝒩_δ, n)`.
pub fn mean_bound(alpha: &RateFunction, a: f64, tail: f64, log_n_delta: f64, delta: f64, n: usize) -> Result<f64> {
    if !(tail > 0.0 && tail <= 1.0) {
        return Err(Error::DomainError(format!("tail mass {tail} outside (0, 1]")));
    }
    let orlicz = 8.0 / a / sigma_inverse(1.0 / tail);
    Ok(2.0 * delta + orlicz + gamma(alpha, log_n_delta, n)?)
}

/// `E W₁(μ, L_n) ≤ 2 W₁(μ, μ^k) + D(μ^k) √(k/n)`.
pub fn mean_bound_quantized(w1_mu_muk: f64, k: usize, diameter: f64, n: usize) -> f64 {
    2.0 * w1_mu_muk + diameter * (k as f64 / n as f64).sqrt()
}

/// `P(W₁(L_n, μ) ≥ t) ≤ exp(−n α(t − m))` for an upper bound `m` on the mean.
pub fn concentration_around_mean(alpha: &RateFunction, mean_bound_value: f64, t: f64, n: usize) -> BoundReport {
    let x = t - mean_bound_value;
    let mut rep = BoundReport::new("mean_concentration", n, t).with("mean_bound", mean_bound_value);
    rep.log_value = if x > 0.0 { -(n as f64) * alpha.eval(x) } else { 0.0 };
    rep
}

/// `‖Z‖_p` for standard normal `Z`: `(2^{p/2} Γ((p + 1)/2)/√π)^{1/p}`.
pub fn gaussian_abs_moment_norm(p: f64) -> f64 {
    (((p / 2.0) * LN_2 + ln_gamma((p + 1.0) / 2.0) - 0.5 * PI.ln()) / p).exp()
}

/// Moment constant of the Kolmogorov continuity theorem: if
/// `E|X_t − X_s|^γ ≤ c|t − s|^{1+ε}`, the `L^γ` norm of the α-Hölder seminorm is
/// at most `2^{1+α}(2c)^{1/γ}/(1 − 2^{α − ε/γ})` for `α < ε/γ`.
pub fn kolmogorov_constant(alpha: f64, gamma_exp: f64, eps: f64, c: f64) -> Result<f64> {
    if !(alpha >= 0.0 && alpha < eps / gamma_exp) {
        return Err(Error::DomainError(format!("need 0 ≤ α < ε/γ, got α = {alpha}")));
    }
    Ok(2f64.powf(1.0 + alpha) * (2.0 * c).powf(1.0 / gamma_exp) / (1.0 - 2f64.powf(alpha - eps / gamma_exp)))
}

/// `C_α = 2^{1+α} 2^{(1−2α)/4}/(1 − 2^{(2α−1)/4}) ‖Z‖_{4/(1−2α)}`, bounding the
/// first two moments of the α-Hölder norm of Brownian motion on `[0, 1]`.
pub fn holder_moment_constant(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::DomainError(format!("Hölder exponent {alpha} outside (0, 1/2)")));
    }
    let p = 4.0 / (1.0 - 2.0 * alpha);
    let num = 2f64.powf(1.0 + alpha) * 2f64.powf((1.0 - 2.0 * alpha) / 4.0);
    Ok(num / (1.0 - 2f64.powf((2.0 * alpha - 1.0) / 4.0)) * gaussian_abs_moment_norm(p))
}

/// `e^{−R²/(2σ²)}`, the Gaussian concentration of a norm above its mean `m`
/// (the bound does not depend on `m`).
pub fn gaussian_tail(_m: f64, sigma2: f64, r: f64) -> f64 {
    (-r * r / (2.0 * sigma2)).exp()
}
