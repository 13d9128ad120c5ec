//! Markov kernels, chain simulation and occupation-measure deviations.

use std::f64::consts::{LN_2, PI};

use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundReport;
use crate::measure::{DiscreteMeasure, Frequency, Metric, Point};
use crate::seed::{self, Rng};
use crate::wasserstein::{quantize, w1, w1_1d, GaussianCdf, Reference};
use crate::{Error, Result};

const STREAM_CONTRACTION: u64 = 0xc0_47ac;
const STREAM_OCCUPATION: u64 = 0x0cc0;

/// A transition kernel `P(x, dy)`.
///
/// `step` must depend only on its arguments so that chains are reproducible.
pub trait MarkovKernel: Send + Sync {
    /// One draw from `P(x, ·)`.
    fn step(&self, x: &Point, rng: &mut Rng) -> Point;

    /// Known `r` with `W₁(P(x, ·), P(y, ·)) ≤ r d(x, y)`.
    fn declared_r(&self) -> Option<f64> {
        None
    }

    /// Known `C` such that every `P(x, ·)` satisfies `T₁(C)`.
    fn declared_c(&self) -> Option<f64> {
        None
    }
}

/// Registry of kernels constructible from configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `X⁺ = rX + σξ` coordinatewise, `ξ ~ N(0, 1)`.
    Ar1 { r: f64, noise_sigma: f64 },
    /// Row-stochastic matrix on the states `0, 1, …` of the line, or on `states` if given.
    FiniteChain {
        matrix: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        states: Option<Vec<f64>>,
    },
    /// `X⁺ = X + step·U`, `U ~ U[−1, 1]`, folded back into `[0, 1]`.
    ReflectedRw { step: f64 },
    /// `X⁺ = X`.
    Identity,
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::Ar1 { r, noise_sigma } => {
                if !(r.is_finite() && noise_sigma.is_finite() && *noise_sigma >= 0.0) {
                    return Err(Error::config("kernel", "ar1 needs finite r and noise_sigma >= 0"));
                }
            }
            KernelSpec::FiniteChain { matrix, states } => {
                let m = matrix.len();
                if m == 0 {
                    return Err(Error::config("kernel.matrix", "empty matrix"));
                }
                for (i, row) in matrix.iter().enumerate() {
                    if row.len() != m {
                        return Err(Error::config("kernel.matrix", format!("row {i} has {} entries, expected {m}", row.len())));
                    }
                    if row.iter().any(|&p| !(p >= 0.0 && p.is_finite())) || (row.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                        return Err(Error::config("kernel.matrix", format!("row {i} is not a probability vector")));
                    }
                }
                if let Some(s) = states {
                    if s.len() != m || s.iter().any(|v| !v.is_finite()) {
                        return Err(Error::config("kernel.states", "need one finite position per matrix row"));
                    }
                }
            }
            KernelSpec::ReflectedRw { step } => {
                if !(step.is_finite() && *step >= 0.0) {
                    return Err(Error::config("kernel.step", "need a finite step >= 0"));
                }
            }
            KernelSpec::Identity => {}
        }
        Ok(())
    }

    fn state_positions(&self) -> Vec<f64> {
        match self {
            KernelSpec::FiniteChain { matrix, states } => states.clone().unwrap_or_else(|| (0..matrix.len()).map(|i| i as f64).collect()),
            _ => Vec::new(),
        }
    }

    /// For a finite chain, `max_{i≠j} W₁(P_i, P_j)/|s_i − s_j|`, which is the
    /// exact contraction coefficient of `ν ↦ νP` on the line.
    pub fn finite_chain_contraction(&self) -> Option<f64> {
        let KernelSpec::FiniteChain { matrix, .. } = self else {
            return None;
        };
        let s = self.state_positions();
        let row = |i: usize| DiscreteMeasure::from_weighted_points(s.iter().map(|&x| Point::scalar(x)).collect(), matrix[i].clone()).ok();
        let mut best = 0.0f64;
        for i in 0..s.len() {
            for j in (i + 1)..s.len() {
                let (a, b) = (row(i)?, row(j)?);
                best = best.max(w1_1d(&a, &b).ok()? / (s[i] - s[j]).abs());
            }
        }
        Some(best)
    }
}

fn fold_unit(mut x: f64) -> f64 {
    x = x.rem_euclid(2.0);
    if x > 1.0 {
        2.0 - x
    } else {
        x
    }
}

impl MarkovKernel for KernelSpec {
    fn step(&self, x: &Point, rng: &mut Rng) -> Point {
        match self {
            KernelSpec::Ar1 { r, noise_sigma } => Point::raw(
                x.coords()
                    .iter()
                    .map(|&v| r * v + noise_sigma * rng.sample::<f64, _>(StandardNormal))
                    .collect(),
            ),
            KernelSpec::FiniteChain { matrix, .. } => {
                let s = self.state_positions();
                let here = x.x();
                let i = (0..s.len())
                    .min_by(|&a, &b| (s[a] - here).abs().total_cmp(&(s[b] - here).abs()))
                    .unwrap_or(0);
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut next = s.len() - 1;
                for (j, &p) in matrix[i].iter().enumerate() {
                    acc += p;
                    if u < acc {
                        next = j;
                        break;
                    }
                }
                Point::scalar(s[next])
            }
            KernelSpec::ReflectedRw { step } => {
                Point::raw(x.coords().iter().map(|&v| fold_unit(v + step * rng.random_range(-1.0..=1.0))).collect())
            }
            KernelSpec::Identity => x.clone(),
        }
    }

    fn declared_r(&self) -> Option<f64> {
        match self {
            KernelSpec::Ar1 { r, .. } => Some(r.abs()),
            KernelSpec::FiniteChain { .. } => self.finite_chain_contraction(),
            _ => None,
        }
    }

    fn declared_c(&self) -> Option<f64> {
        match self {
            KernelSpec::Ar1 { noise_sigma, .. } => Some(2.0 * noise_sigma * noise_sigma),
            _ => None,
        }
    }
}

/// A simulated trajectory `X₀, …, X_{burn_in + n}` and its occupation measure.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRun {
    pub path: Vec<Point>,
    /// Empirical measure of `X_{burn_in+1}, …, X_{burn_in+n}`.
    pub occupation: DiscreteMeasure,
    pub burn_in: usize,
}

fn run_path<K: MarkovKernel + ?Sized>(k: &K, x0: &Point, steps: usize, rng: &mut Rng) -> Vec<Point> {
    let mut path = Vec::with_capacity(steps + 1);
    path.push(x0.clone());
    for i in 0..steps {
        let next = k.step(&path[i], rng);
        path.push(next);
    }
    path
}

pub fn simulate_chain<K: MarkovKernel + ?Sized>(k: &K, x0: &Point, n: usize, burn_in: usize, seed: u64) -> Result<ChainRun> {
    if n == 0 {
        return Err(Error::DomainError("chain length n must be >= 1".into()));
    }
    let mut rng = seed::rng(seed);
    let path = run_path(k, x0, n + burn_in, &mut rng);
    let occupation = DiscreteMeasure::empirical(path[burn_in + 1..].to_vec())?;
    Ok(ChainRun { path, occupation, burn_in })
}

/// Result of [`estimate_contraction`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionEstimate {
    /// `max` over pairs of the baseline-corrected ratio, floored at 0.
    pub estimate: f64,
    /// `max` over pairs of the uncorrected ratio.
    pub raw: f64,
    /// Largest same-law baseline `W₁` among the pairs.
    pub baseline: f64,
    /// Corrected ratio of each pair, in input order.
    pub per_pair: Vec<f64>,
}

fn kernel_sample<K: MarkovKernel + ?Sized>(k: &K, x: &Point, n: usize, seed: u64) -> Result<DiscreteMeasure> {
    let mut rng = seed::rng(seed);
    DiscreteMeasure::empirical((0..n).map(|_| k.step(x, &mut rng)).collect())
}

/// Estimates `r` from empirical measures of `n_mc` draws of `P(x, ·)` and `P(y, ·)`.
///
/// Two independent samples of equal laws are at positive `W₁`, so for each pair
/// the distance between two independent samples of `P(x, ·)` is subtracted before
/// dividing by `d(x, y)`. Euclidean metric; on the line the CDF formula is used.
pub fn estimate_contraction<K: MarkovKernel + ?Sized>(k: &K, pairs: &[(Point, Point)], n_mc: usize, seed: u64) -> Result<ContractionEstimate> {
    if pairs.is_empty() || n_mc == 0 {
        return Err(Error::DomainError("need at least one pair and n_mc >= 1".into()));
    }
    let metric = Metric::Euclidean;
    let results: Vec<Result<(f64, f64, f64)>> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (x, y))| {
            let d = metric.distance(x, y);
            if !(d > 0.0) {
                return Err(Error::DomainError(format!("pair {i} has d(x, y) = 0")));
            }
            let i = i as u64;
            let px = kernel_sample(k, x, n_mc, seed::derive(seed, STREAM_CONTRACTION, 3 * i))?;
            let py = kernel_sample(k, y, n_mc, seed::derive(seed, STREAM_CONTRACTION, 3 * i + 1))?;
            let px2 = kernel_sample(k, x, n_mc, seed::derive(seed, STREAM_CONTRACTION, 3 * i + 2))?;
            let cross = w1(&px, &py, &metric)?;
            let same = w1(&px, &px2, &metric)?;
            Ok((cross / d, (cross - same) / d, same))
        })
        .collect();
    let mut est = ContractionEstimate {
        estimate: 0.0,
        raw: 0.0,
        baseline: 0.0,
        per_pair: Vec::with_capacity(pairs.len()),
    };
    for r in results {
        let (raw, corrected, same) = r?;
        est.raw = est.raw.max(raw);
        est.estimate = est.estimate.max(corrected);
        est.baseline = est.baseline.max(same);
        est.per_pair.push(corrected);
    }
    Ok(est)
}

/// `W₁(π_n, π) ≤ m₁/(n(1 − r))` for the averaged occupation measure `π_n`.
pub fn invariant_distance_bound(m1: f64, r: f64, n: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::ContractionOutOfRange(r));
    }
    if !(m1 >= 0.0) || n == 0 {
        return Err(Error::DomainError(format!("need m1 >= 0 and n >= 1, got m1 = {m1}, n = {n}")));
    }
    Ok(m1 / (n as f64 * (1.0 - r)))
}

/// `a = (2/C)(√(4m₁² + C log 2) − 2m₁)`, the positive root of `2m₁a + Ca²/4 = log 2`.
pub fn markov_rate_a(c: f64, m1: f64) -> f64 {
    // rationalized to avoid cancellation when m₁² ≫ C
    let a = 2.0 * LN_2 / ((4.0 * m1 * m1 + c * LN_2).sqrt() + 2.0 * m1);
    debug_assert!(2.0 * m1 * a + c * a * a / 4.0 <= LN_2 * (1.0 + 1e-12));
    a
}

/// Default dimension constant of the Markov bound, `65^{d/2}`: the square root
/// of the ℝ^d covering constant, since `K(n, t)` carries `√log 𝒩`.
pub fn default_markov_c_d(d: usize) -> f64 {
    65f64.powf(d as f64 / 2.0)
}

/// [`bound_markov_with`] at the default dimension constant.
pub fn bound_markov(c: f64, r: f64, m1: f64, d: usize, t: f64, n: usize) -> Result<BoundReport> {
    bound_markov_with(c, r, m1, d, t, n, default_markov_c_d(d))
}

/// `K(n, t) exp(−n(1 − r)² t²/(8C))` with
/// `log K = [m₁/√(nC) + C_d u^{d/2}]²`, `u = (1/at) log(1/at)` floored at 0.
pub fn bound_markov_with(c: f64, r: f64, m1: f64, d: usize, t: f64, n: usize, c_d: f64) -> Result<BoundReport> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::ContractionOutOfRange(r));
    }
    if !(c > 0.0 && m1 >= 0.0 && t > 0.0 && n >= 1) {
        return Err(Error::DomainError(format!("need C > 0, m1 >= 0, t > 0, n >= 1; got C = {c}, m1 = {m1}, t = {t}, n = {n}")));
    }
    let a = markov_rate_a(c, m1);
    if t > 2.0 / a {
        return Err(Error::RegimeViolation(format!("t = {t} exceeds 2/a = {}", 2.0 / a)));
    }
    let nf = n as f64;
    let x = 1.0 / (a * t);
    let cover = (x * x.ln()).max(0.0).powf(d as f64 / 2.0);
    let m1_term = m1 / (nf * c).sqrt();
    let log_k = (m1_term + c_d * cover).powi(2);
    let exponent = nf * (1.0 - r).powi(2) * t * t / (8.0 * c);
    let mut intermediates = std::collections::BTreeMap::new();
    for (k, v) in [
        ("a", a),
        ("c", c),
        ("r", r),
        ("m1", m1),
        ("c_d", c_d),
        ("cover_term", cover),
        ("m1_term", m1_term),
        ("log_k", log_k),
        ("exponent", exponent),
    ] {
        intermediates.insert(k.to_string(), v);
    }
    Ok(BoundReport {
        name: "markov".into(),
        n,
        t,
        log_value: log_k - exponent,
        intermediates,
    })
}

/// Stationary law `N(0, σ²/(1 − r²))` of the AR(1) kernel.
pub fn ar1_stationary(r: f64, noise_sigma: f64) -> Result<GaussianCdf> {
    if !(r.abs() < 1.0) {
        return Err(Error::ContractionOutOfRange(r));
    }
    Ok(GaussianCdf {
        mean: 0.0,
        sd: noise_sigma / (1.0 - r * r).sqrt(),
    })
}

/// `m₁ = E_π|X| = sd √(2/π)` for the AR(1) stationary law.
pub fn ar1_m1(r: f64, noise_sigma: f64) -> Result<f64> {
    Ok(ar1_stationary(r, noise_sigma)?.sd * (2.0 / PI).sqrt())
}

/// A finite stand-in for the invariant measure of a kernel without a closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct LongRunReference {
    pub measure: DiscreteMeasure,
    /// `W₁` between the occupation measures of the two halves of the run plus the
    /// discretization error; add it to deviation thresholds.
    pub error: f64,
}

/// Runs the chain for `n_long` steps from `x0` and compresses the occupation
/// measure to at most `m` atoms: equal-mass blocks of the sorted path on the
/// line, [`quantize`] in higher dimension.
pub fn long_run_reference<K: MarkovKernel + ?Sized>(k: &K, x0: &Point, n_long: usize, m: usize, seed: u64) -> Result<LongRunReference> {
    if n_long < 2 || m == 0 {
        return Err(Error::DomainError("need n_long >= 2 and m >= 1".into()));
    }
    let run = simulate_chain(k, x0, n_long, 0, seed)?;
    let path = &run.path[1..];
    let half = path.len() / 2;
    let first = DiscreteMeasure::empirical(path[..half].to_vec())?;
    let second = DiscreteMeasure::empirical(path[half..].to_vec())?;
    let metric = Metric::Euclidean;
    let split = w1(&first, &second, &metric)?;
    let (measure, disc) = if x0.dim() == 1 {
        let mut xs: Vec<f64> = path.iter().map(|p| p.x()).collect();
        xs.sort_by(f64::total_cmp);
        let blocks = m.min(xs.len());
        let mut atoms = Vec::with_capacity(blocks);
        let mut weights = Vec::with_capacity(blocks);
        for b in 0..blocks {
            let lo = b * xs.len() / blocks;
            let hi = (b + 1) * xs.len() / blocks;
            atoms.push(Point::scalar(xs[(lo + hi) / 2]));
            weights.push((hi - lo) as f64 / xs.len() as f64);
        }
        let q = DiscreteMeasure::from_weighted_points(atoms, weights)?;
        let disc = w1_1d(&q, &run.occupation)?;
        (q, disc)
    } else {
        let q = quantize(&run.occupation, m, &metric)?;
        (q.measure, q.achieved)
    };
    Ok(LongRunReference { measure, error: split + disc })
}

/// `W₁(L_n, reference)` for `trials` independent chains of length `n` from `x0`.
pub fn occupation_distances<K: MarkovKernel + ?Sized>(
    k: &K,
    reference: &Reference,
    x0: &Point,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let metric = Metric::Euclidean;
    (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let run = simulate_chain(k, x0, n, 0, seed::derive(seed, STREAM_OCCUPATION, i))?;
            reference.distance(&run.occupation, &metric)
        })
        .collect()
}

/// Frequency of `W₁(L_n, reference) ≥ t` over independent chains started at `x0`.
pub fn occupation_deviation_mc<K: MarkovKernel + ?Sized>(
    k: &K,
    reference: &Reference,
    x0: &Point,
    n: usize,
    t: f64,
    trials: usize,
    seed: u64,
) -> Result<Frequency> {
    if trials == 0 {
        return Err(Error::DomainError("trials must be >= 1".into()));
    }
    Ok(Frequency::exceeding(&occupation_distances(k, reference, x0, n, trials, seed)?, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate::{rate_markov_transform, RateFunction};

    fn ar1(r: f64) -> KernelSpec {
        KernelSpec::Ar1 { r, noise_sigma: 1.0 }
    }

    #[test]
    fn identity_chain_stays_put() {
        let x0 = Point::scalar(0.7);
        let run = simulate_chain(&KernelSpec::Identity, &x0, 50, 3, 1).unwrap();
        assert_eq!(run.path.len(), 54);
        assert_eq!(run.occupation, DiscreteMeasure::dirac(x0));
    }

    #[test]
    fn iid_ar1_occupation_is_gaussian() {
        let run = simulate_chain(&ar1(0.0), &Point::scalar(0.0), 10_000, 0, 2).unwrap();
        let mut xs: Vec<f64> = run.path[1..].iter().map(|p| p.x()).collect();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = crate::numeric::normal_cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.05, "{ks}");
    }

    #[test]
    fn ar1_stationary_variance() {
        let run = simulate_chain(&ar1(0.9), &Point::scalar(0.0), 100_000, 0, 3).unwrap();
        let m = run.occupation.integrate(|p| p.x());
        let v = run.occupation.integrate(|p| (p.x() - m).powi(2));
        let target = 1.0 / (1.0 - 0.81);
        assert!((v / target - 1.0).abs() < 0.1, "{v}");
    }

    #[test]
    fn chain_is_deterministic_given_seed() {
        let k = KernelSpec::ReflectedRw { step: 0.3 };
        let a = simulate_chain(&k, &Point::scalar(0.5), 100, 5, 9).unwrap();
        let b = simulate_chain(&k, &Point::scalar(0.5), 100, 5, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.path.iter().all(|p| (0.0..=1.0).contains(&p.x())));
    }

    #[test]
    fn contraction_estimates() {
        let pairs = vec![(Point::scalar(-1.0), Point::scalar(1.0)), (Point::scalar(0.0), Point::scalar(1.5))];
        let e = estimate_contraction(&ar1(0.5), &pairs, 10_000, 4).unwrap();
        assert!((0.45..=0.60).contains(&e.estimate), "{e:?}");
        let e0 = estimate_contraction(&ar1(0.0), &pairs, 10_000, 5).unwrap();
        assert!(e0.estimate < 0.05, "{e0:?}");
        assert!(e0.raw > 0.0);
        let bad = vec![(Point::scalar(1.0), Point::scalar(1.0))];
        assert!(estimate_contraction(&ar1(0.5), &bad, 10, 1).is_err());
    }

    #[test]
    fn invariant_distance_examples() {
        assert_eq!(invariant_distance_bound(0.0, 0.3, 10).unwrap(), 0.0);
        assert!((invariant_distance_bound(1.0, 0.5, 100).unwrap() - 0.02).abs() < 1e-15);
        let a = invariant_distance_bound(1.3, 0.2, 40).unwrap();
        let b = invariant_distance_bound(1.3, 0.2, 80).unwrap();
        assert!((a - 2.0 * b).abs() < 1e-15);
        assert!(matches!(invariant_distance_bound(1.0, 1.0, 1), Err(Error::ContractionOutOfRange(_))));
    }

    #[test]
    fn rate_a_examples() {
        assert!((markov_rate_a(1.0, 0.0) - 2.0 * LN_2.sqrt()).abs() < 1e-12);
        for &(c, m1) in &[(1.0, 0.3), (2.0, 5.0), (0.1, 1e3), (7.0, 1e-6)] {
            let a = markov_rate_a(c, m1);
            assert!((2.0 * m1 * a + c * a * a / 4.0 - LN_2).abs() < 1e-12);
            assert!(markov_rate_a(c, m1 * 1.5) < a);
        }
    }

    #[test]
    fn markov_bound_examples() {
        let a = markov_rate_a(2.0, 0.0);
        let r = bound_markov(2.0, 0.5, 0.0, 1, 2.0 / a * 0.999, 100).unwrap();
        assert_eq!(r.get("m1_term"), Some(0.0));
        assert!(matches!(bound_markov(2.0, 0.5, 0.0, 1, 2.0 / a * 1.01, 100), Err(Error::RegimeViolation(_))));
        let iid = bound_markov(2.0, 0.0, 0.4, 1, 0.5, 1000).unwrap();
        assert!((iid.get("exponent").unwrap() - 1000.0 * 0.25 / 16.0).abs() < 1e-12);
        // the m₁ term vanishes, leaving the n-free cover term
        let big = bound_markov(2.0, 0.3, 0.4, 1, 0.5, 100_000_000).unwrap();
        let rate = -big.log_value / 1e8;
        assert!((rate - 0.49 * 0.25 / 16.0).abs() / rate < 1e-3);
    }

    #[test]
    fn markov_exponent_matches_transformed_rate() {
        let c = 2.0;
        let q = RateFunction::quadratic(c);
        for &r in &[0.0, 0.3, 0.6] {
            let n = 100;
            let (path, _) = rate_markov_transform(&q, r, n).unwrap();
            let t = 0.8;
            let b = bound_markov(c, r, 0.5, 1, t, n).unwrap();
            // a 1/n-Lipschitz functional of the path deviating by t/√8
            let via = path.eval(n as f64 * t / 8f64.sqrt());
            assert!((b.get("exponent").unwrap() - via).abs() < 1e-9);
        }
    }

    #[test]
    fn occupation_frequency_examples() {
        let k = ar1(0.5);
        let pi = Reference::analytic(ar1_stationary(0.5, 1.0).unwrap());
        let x0 = Point::scalar(0.0);
        assert_eq!(occupation_deviation_mc(&k, &pi, &x0, 200, 0.0, 20, 1).unwrap().freq, 1.0);
        assert_eq!(occupation_deviation_mc(&k, &pi, &x0, 500, 5.0, 20, 1).unwrap().freq, 0.0);
    }

    #[test]
    fn finite_chain_contraction_and_long_run() {
        let k = KernelSpec::FiniteChain {
            matrix: vec![vec![0.5, 0.5], vec![0.25, 0.75]],
            states: None,
        };
        k.validate().unwrap();
        assert!((k.declared_r().unwrap() - 0.25).abs() < 1e-12);
        let lr = long_run_reference(&k, &Point::scalar(0.0), 20_000, 10, 7).unwrap();
        let mass1 = lr.measure.integrate(|p| p.x());
        assert!((mass1 - 2.0 / 3.0).abs() < 0.05 + lr.error, "{mass1} {}", lr.error);
    }
}
