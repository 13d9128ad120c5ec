//! Points, metrics, finitely supported measures and seeded samplers.
//!
//! A [`Point`] is either a vector of ℝ^d or a path of `C([0, 1])` sampled on a
//! uniform grid `t_i = i / (m - 1)`. The base point `x₀` defaults to the origin
//! (the zero vector, or the zero path).

use std::cmp::Ordering;

use rand::Rng as _;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::numeric::compensated_sum;
use crate::seed::{self, Rng};
use crate::{Error, Result};

/// Two points closer than this in every coordinate are the same support point.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// Tolerance on the total mass of a [`DiscreteMeasure`].
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Default grid size for Brownian paths.
pub const DEFAULT_GRID_SIZE: usize = 1024;

/// A point of ℝ^d, or a path on a uniform grid of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidPoint("no coordinates".into()));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint(format!("non-finite coordinate {bad}")));
        }
        Ok(Point(coords))
    }

    /// Skips validation; callers guarantee finite, nonempty coordinates.
    pub(crate) fn raw(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn scalar(x: f64) -> Self {
        Point::new(vec![x]).expect("finite scalar")
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![0.0; dim.max(1)])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// First coordinate; the value of a 1-D point.
    pub fn x(&self) -> f64 {
        self.0[0]
    }

    fn lex_cmp(&self, other: &Point) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.0.len().cmp(&other.0.len())
    }

    /// Same point up to [`MERGE_TOLERANCE`].
    pub fn coincides(&self, other: &Point) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| (a - b).abs() <= MERGE_TOLERANCE)
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

/// Distance on [`Point`]s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Metric {
    Euclidean,
    /// Uniform distance between paths on a common grid.
    SupNormPath,
    /// α-Hölder seminorm of the difference of two paths on a common grid.
    HolderSeminorm { alpha: f64 },
}

impl Metric {
    /// Distance between two points of equal dimension.
    ///
    /// Panics if the dimensions differ; measures validate this on construction.
    pub fn distance(&self, a: &Point, b: &Point) -> f64 {
        assert_eq!(a.dim(), b.dim(), "points of different dimension");
        let (x, y) = (a.coords(), b.coords());
        match *self {
            Metric::Euclidean => {
                if x.len() == 1 {
                    return (x[0] - y[0]).abs();
                }
                x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
            }
            Metric::SupNormPath => x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max),
            Metric::HolderSeminorm { alpha } => {
                let diff: Vec<f64> = x.iter().zip(y).map(|(p, q)| p - q).collect();
                holder_seminorm_unchecked(&diff, alpha)
            }
        }
    }

    /// Validates metric parameters.
    pub fn validate(&self) -> Result<()> {
        if let Metric::HolderSeminorm { alpha } = *self {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Error::DomainError(format!("Hölder exponent {alpha} outside (0, 1]")));
            }
        }
        Ok(())
    }
}

/// α-Hölder seminorm `sup_{s≠t} |x(t) − x(s)| / |t − s|^α` of a path on the
/// uniform grid of `[0, 1]`, as an exact sup over all grid pairs.
pub fn holder_norm(path: &Point, alpha: f64) -> Result<f64> {
    if path.dim() < 2 {
        return Err(Error::GridTooSmall(path.dim()));
    }
    Metric::HolderSeminorm { alpha }.validate()?;
    Ok(holder_seminorm_unchecked(path.coords(), alpha))
}

fn holder_seminorm_unchecked(x: &[f64], alpha: f64) -> f64 {
    let m = x.len();
    if m < 2 {
        return 0.0;
    }
    let h = 1.0 / (m - 1) as f64;
    // weight[k] = (k h)^(-α) for lag k
    let weight: Vec<f64> = (0..m)
        .map(|k| if k == 0 { 0.0 } else { (k as f64 * h).powf(-alpha) })
        .collect();
    let mut best = 0.0f64;
    for i in 0..m {
        let xi = x[i];
        for (k, xj) in x[i + 1..].iter().enumerate() {
            let v = (xj - xi).abs() * weight[k + 1];
            if v > best {
                best = v;
            }
        }
    }
    best
}

/// A probability measure with finite support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct DiscreteMeasure {
    support: Vec<Point>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawMeasure {
    points: Vec<Point>,
    weights: Vec<f64>,
}

impl TryFrom<RawMeasure> for DiscreteMeasure {
    type Error = Error;
    fn try_from(raw: RawMeasure) -> Result<Self> {
        DiscreteMeasure::from_weighted_points(raw.points, raw.weights)
    }
}

impl From<DiscreteMeasure> for RawMeasure {
    fn from(m: DiscreteMeasure) -> Self {
        RawMeasure {
            points: m.support,
            weights: m.weights,
        }
    }
}

impl DiscreteMeasure {
    /// Validating constructor; the support order is kept as given.
    pub fn new(support: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        check_shape(&support, &weights)?;
        let mut order: Vec<usize> = (0..support.len()).collect();
        order.sort_by(|&i, &j| support[i].lex_cmp(&support[j]));
        if let Some(w) = order.windows(2).find(|w| support[w[0]].coincides(&support[w[1]])) {
            return Err(Error::InvalidMeasure(format!(
                "duplicate support point {:?}",
                support[w[0]].coords()
            )));
        }
        Ok(DiscreteMeasure { support, weights })
    }

    /// Builds a measure from weighted points, merging coincident points (summing
    /// their weights). The support comes out in lexicographic order.
    pub fn from_weighted_points(points: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        check_shape(&points, &weights)?;
        let mut items: Vec<(Point, f64)> = points.into_iter().zip(weights).collect();
        items.sort_by(|a, b| a.0.lex_cmp(&b.0));
        let mut support: Vec<Point> = Vec::with_capacity(items.len());
        let mut merged: Vec<Vec<f64>> = Vec::with_capacity(items.len());
        for (p, w) in items {
            match support.last() {
                Some(last) if last.coincides(&p) => merged.last_mut().unwrap().push(w),
                _ => {
                    support.push(p);
                    merged.push(vec![w]);
                }
            }
        }
        let weights = merged.into_iter().map(compensated_sum).collect();
        Ok(DiscreteMeasure { support, weights })
    }

    /// Empirical measure `(1/n) Σ δ_{x_i}`; repeated points get weight `k/n`.
    pub fn empirical(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidMeasure("empty sample".into()));
        }
        let n = points.len();
        let dim = points[0].dim();
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
        }
        let mut points = points;
        points.sort_by(|a, b| a.lex_cmp(b));
        let mut support: Vec<Point> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for p in points {
            match support.last() {
                Some(last) if last.coincides(&p) => *counts.last_mut().unwrap() += 1,
                _ => {
                    support.push(p);
                    counts.push(1);
                }
            }
        }
        let weights = counts.into_iter().map(|c| c as f64 / n as f64).collect();
        Ok(DiscreteMeasure { support, weights })
    }

    pub fn dirac(p: Point) -> Self {
        DiscreteMeasure {
            support: vec![p],
            weights: vec![1.0],
        }
    }

    /// Uniform measure on distinct points.
    pub fn uniform(points: Vec<Point>) -> Result<Self> {
        let k = points.len();
        DiscreteMeasure::new(points, vec![1.0 / k.max(1) as f64; k])
    }

    /// Measure on the real line.
    pub fn from_1d(xs: &[f64], ws: &[f64]) -> Result<Self> {
        let pts = xs.iter().map(|&x| Point::new(vec![x])).collect::<Result<Vec<_>>>()?;
        DiscreteMeasure::new(pts, ws.to_vec())
    }

    pub fn support(&self) -> &[Point] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.support[0].dim()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, f64)> {
        self.support.iter().zip(self.weights.iter().copied())
    }

    /// Largest distance between two support points.
    pub fn diameter(&self, metric: &Metric) -> f64 {
        if self.is_1d() && *metric == Metric::Euclidean {
            let (lo, hi) = self
                .support
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.x()), hi.max(p.x())));
            return hi - lo;
        }
        let mut d = 0.0f64;
        for (i, p) in self.support.iter().enumerate() {
            for q in &self.support[i + 1..] {
                d = d.max(metric.distance(p, q));
            }
        }
        d
    }

    pub fn is_1d(&self) -> bool {
        self.dim() == 1
    }

    /// `∫ d(x, x₀) dμ`.
    pub fn first_moment(&self, x0: &Point, metric: &Metric) -> f64 {
        compensated_sum(self.iter().map(|(p, w)| w * metric.distance(p, x0)))
    }

    /// `∫ f dμ`.
    pub fn integrate<F: Fn(&Point) -> f64>(&self, f: F) -> f64 {
        compensated_sum(self.iter().map(|(p, w)| w * f(p)))
    }

    /// Index of the support point coinciding with `p`.
    pub fn position(&self, p: &Point) -> Option<usize> {
        self.support.iter().position(|q| q.coincides(p))
    }
}

fn check_shape(support: &[Point], weights: &[f64]) -> Result<()> {
    if support.is_empty() {
        return Err(Error::InvalidMeasure("empty support".into()));
    }
    if support.len() != weights.len() {
        return Err(Error::InvalidMeasure(format!(
            "{} support points but {} weights",
            support.len(),
            weights.len()
        )));
    }
    let dim = support[0].dim();
    if let Some(p) = support.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::InvalidMeasure(format!("weight {w} is not a nonnegative number")));
    }
    let total = compensated_sum(weights.iter().copied());
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::InvalidMeasure(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

/// A named reference law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Law {
    /// Independent coordinates `N(mean_i, var_i)`.
    Gaussian { mean: Vec<f64>, var: Vec<f64> },
    /// Uniform on `[0, 1]^d`.
    UniformCube { d: usize },
    /// Exponential law of the given rate on `[0, ∞)`.
    ExponentialTail { rate: f64 },
    /// Standard Brownian motion on `grid_size` uniform points of `[0, 1]`.
    BrownianPath { grid_size: usize },
    Finite { measure: DiscreteMeasure },
    /// Mixture with weights normalized to 1.
    Mixture { components: Vec<(f64, Law)> },
}

impl Law {
    pub fn standard_gaussian(d: usize) -> Self {
        Law::Gaussian {
            mean: vec![0.0; d],
            var: vec![1.0; d],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Law::Gaussian { mean, var } => {
                if mean.is_empty() || mean.len() != var.len() {
                    return Err(Error::config("law.mean", "mean and var must be nonempty and of equal length"));
                }
                if var.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || mean.iter().any(|m| !m.is_finite()) {
                    return Err(Error::config("law.var", "variances must be finite and nonnegative"));
                }
            }
            Law::UniformCube { d } if *d == 0 => return Err(Error::config("law.d", "dimension must be >= 1")),
            Law::ExponentialTail { rate } if !(*rate > 0.0 && rate.is_finite()) => {
                return Err(Error::config("law.rate", "rate must be positive"))
            }
            Law::BrownianPath { grid_size } if *grid_size < 2 => return Err(Error::GridTooSmall(*grid_size)),
            Law::Mixture { components } => {
                if components.is_empty() {
                    return Err(Error::config("law.components", "mixture needs a component"));
                }
                if components.iter().any(|(w, _)| !(*w >= 0.0 && w.is_finite())) {
                    return Err(Error::config("law.components", "mixture weights must be nonnegative"));
                }
                let dim = components[0].1.dim();
                for (_, c) in components {
                    c.validate()?;
                    if c.dim() != dim {
                        return Err(Error::DimensionMismatch { expected: dim, found: c.dim() });
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Law::Gaussian { mean, .. } => mean.len(),
            Law::UniformCube { d } => *d,
            Law::ExponentialTail { .. } => 1,
            Law::BrownianPath { grid_size } => *grid_size,
            Law::Finite { measure } => measure.dim(),
            Law::Mixture { components } => components[0].1.dim(),
        }
    }

    /// Euclidean for vector laws, uniform distance for path laws.
    pub fn natural_metric(&self) -> Metric {
        match self {
            Law::BrownianPath { .. } => Metric::SupNormPath,
            Law::Mixture { components } => components[0].1.natural_metric(),
            _ => Metric::Euclidean,
        }
    }

    /// The law as a finite measure, when it is one.
    pub fn as_finite(&self) -> Option<DiscreteMeasure> {
        match self {
            Law::Finite { measure } => Some(measure.clone()),
            Law::Mixture { components } => {
                let total: f64 = components.iter().map(|(w, _)| w).sum();
                let mut pts = Vec::new();
                let mut ws = Vec::new();
                for (w, c) in components {
                    let m = c.as_finite()?;
                    for (p, v) in m.iter() {
                        pts.push(p.clone());
                        ws.push(w / total * v);
                    }
                }
                let s = compensated_sum(ws.iter().copied());
                ws.iter_mut().for_each(|w| *w /= s);
                DiscreteMeasure::from_weighted_points(pts, ws).ok()
            }
            _ => None,
        }
    }

    fn draw(&self, rng: &mut Rng) -> Point {
        match self {
            Law::Gaussian { mean, var } => Point(
                mean.iter()
                    .zip(var)
                    .map(|(m, v)| {
                        let z: f64 = rng.sample(StandardNormal);
                        m + v.sqrt() * z
                    })
                    .collect(),
            ),
            Law::UniformCube { d } => Point((0..*d).map(|_| rng.random::<f64>()).collect()),
            Law::ExponentialTail { rate } => Point(vec![Exp::new(*rate).expect("positive rate").sample(rng)]),
            Law::BrownianPath { grid_size } => {
                let sd = (1.0 / (*grid_size - 1) as f64).sqrt();
                let mut path = Vec::with_capacity(*grid_size);
                let mut b = 0.0;
                path.push(b);
                for _ in 1..*grid_size {
                    let z: f64 = rng.sample(StandardNormal);
                    b += sd * z;
                    path.push(b);
                }
                Point(path)
            }
            Law::Finite { measure } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (p, w) in measure.iter() {
                    acc += w;
                    if u < acc {
                        return p.clone();
                    }
                }
                // mass rounding: fall back to the last atom with positive weight
                let idx = measure.weights().iter().rposition(|w| *w > 0.0).unwrap_or(0);
                measure.support()[idx].clone()
            }
            Law::Mixture { components } => {
                let total: f64 = components.iter().map(|(w, _)| w).sum();
                let u = rng.random::<f64>() * total;
                let mut acc = 0.0;
                for (w, c) in components {
                    acc += w;
                    if u < acc {
                        return c.draw(rng);
                    }
                }
                components.last().unwrap().1.draw(rng)
            }
        }
    }
}

/// A seeded generator of i.i.d. draws from a [`Law`].
///
/// Equal `(law, seed)` pairs reproduce identical sample streams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sampler {
    pub law: Law,
    pub seed: u64,
}

/// A live stream of draws.
pub struct SampleStream<'a> {
    law: &'a Law,
    rng: Rng,
}

impl SampleStream<'_> {
    pub fn draw(&mut self) -> Point {
        self.law.draw(&mut self.rng)
    }
}

impl Iterator for SampleStream<'_> {
    type Item = Point;
    fn next(&mut self) -> Option<Point> {
        Some(self.draw())
    }
}

impl Sampler {
    pub fn new(law: Law, seed: u64) -> Self {
        Sampler { law, seed }
    }

    pub fn stream(&self) -> SampleStream<'_> {
        SampleStream {
            law: &self.law,
            rng: seed::rng(self.seed),
        }
    }

    /// Independent sampler for sub-stream `index`.
    pub fn split(&self, index: u64) -> Sampler {
        Sampler {
            law: self.law.clone(),
            seed: seed::derive(self.seed, 0x5a11, index),
        }
    }

    pub fn draw_n(&self, n: usize) -> Vec<Point> {
        self.stream().take(n).collect()
    }

    /// Empirical measure of `n` i.i.d. draws.
    pub fn sample_empirical(&self, n: usize) -> Result<DiscreteMeasure> {
        if n == 0 {
            return Err(Error::InvalidMeasure("n must be >= 1".into()));
        }
        DiscreteMeasure::empirical(self.draw_n(n))
    }

    /// `E g(X)`: exact for finite laws, Monte-Carlo mean over `n_mc` draws otherwise.
    pub fn expectation<G: Fn(&Point) -> f64>(&self, g: G, n_mc: usize) -> McEstimate {
        if let Some(m) = self.law.as_finite() {
            return McEstimate {
                mean: m.integrate(&g),
                stderr: 0.0,
                samples: 0,
            };
        }
        McEstimate::from_values(self.stream().take(n_mc.max(1)).map(|p| g(&p)))
    }
}

/// Monte-Carlo mean with its standard error. `samples == 0` marks an exact value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl McEstimate {
    pub fn from_values<I: IntoIterator<Item = f64>>(values: I) -> Self {
        // Welford
        let mut n = 0usize;
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for v in values {
            n += 1;
            let delta = v - mean;
            mean += delta / n as f64;
            m2 += delta * (v - mean);
        }
        let stderr = if n > 1 { (m2 / (n - 1) as f64 / n as f64).sqrt() } else { 0.0 };
        McEstimate { mean, stderr, samples: n }
    }

    pub fn is_exact(&self) -> bool {
        self.samples == 0
    }
}

/// Fraction of trials in which an event occurred, with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub freq: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl Frequency {
    pub fn from_counts(hits: usize, trials: usize) -> Self {
        let freq = if trials == 0 { 0.0 } else { hits as f64 / trials as f64 };
        let stderr = if trials == 0 { 0.0 } else { (freq * (1.0 - freq) / trials as f64).sqrt() };
        Frequency { freq, stderr, trials }
    }

    /// Frequency of `value ≥ t` among `values`.
    pub fn exceeding(values: &[f64], t: f64) -> Self {
        Self::from_counts(values.iter().filter(|&&v| v >= t).count(), values.len())
    }
}

/// Moment summary of a law around `x₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    /// `∫ d(x, x₀) μ(dx)`
    pub m1: f64,
    /// `∫ exp(a d(x, x₀)) μ(dx)`
    pub e_a1: f64,
    /// `∫ exp(a d²(x, x₀)) μ(dx)`
    pub e_a2: f64,
    pub a: f64,
}

/// Mean of `d(X, x₀)` with its standard error.
pub fn estimate_m1(sampler: &Sampler, x0: &Point, metric: &Metric, n_mc: usize) -> McEstimate {
    sampler.expectation(|p| metric.distance(p, x0), n_mc)
}

/// Exponential and square-exponential moments at rate `a`.
pub fn moment_report(sampler: &Sampler, x0: &Point, metric: &Metric, a: f64, n_mc: usize) -> MomentReport {
    let m1 = estimate_m1(sampler, x0, metric, n_mc).mean;
    let s1 = sampler.split(1);
    let s2 = sampler.split(2);
    let e_a1 = s1.expectation(|p| (a * metric.distance(p, x0)).exp(), n_mc).mean.max(1.0);
    let e_a2 = s2
        .expectation(
            |p| {
                let d = metric.distance(p, x0);
                (a * d * d).exp()
            },
            n_mc,
        )
        .mean
        .max(1.0);
    MomentReport { m1, e_a1, e_a2, a }
}

/// Bisection iterations of [`find_exp_rate`].
pub const EXP_RATE_BISECTIONS: usize = 60;
/// Monte-Carlo budget of [`find_exp_rate`] for non-finite laws.
pub const EXP_RATE_BUDGET: usize = 20_000;
const EXP_RATE_CAP: f64 = 1.0e12;
const EXP_RATE_FLOOR: f64 = 1.0e-12;

/// A rate `a > 0` with `E exp(a d(X, x₀)) ≤ target`, as large as the estimate allows.
///
/// All rates are evaluated on one common set of distances (exact atoms for
/// finite laws, [`EXP_RATE_BUDGET`] draws otherwise), which makes the estimate
/// of `a ↦ E exp(a d)` monotone so the bisection is well posed. The returned
/// rate is the lower end of the final bracket, hence its estimate lies in
/// `[0.95 target, target]` unless the law is a point mass at `x₀`, in which case
/// the upper bracket cap is returned.
pub fn find_exp_rate(sampler: &Sampler, x0: &Point, metric: &Metric, target: f64) -> Result<f64> {
    find_exp_rate_with_budget(sampler, x0, metric, target, EXP_RATE_BUDGET)
}

pub fn find_exp_rate_with_budget(
    sampler: &Sampler,
    x0: &Point,
    metric: &Metric,
    target: f64,
    n_mc: usize,
) -> Result<f64> {
    if !(target > 1.0) {
        return Err(Error::DomainError(format!("target {target} must exceed 1")));
    }
    let (dists, logw): (Vec<f64>, Vec<f64>) = match sampler.law.as_finite() {
        Some(m) => m
            .iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|(p, w)| (metric.distance(p, x0), w.ln()))
            .unzip(),
        None => {
            let n = n_mc.max(1);
            let lw = -(n as f64).ln();
            sampler.split(0xe4a).stream().take(n).map(|p| (metric.distance(&p, x0), lw)).unzip()
        }
    };
    let log_target = target.ln();
    let log_moment = |a: f64| -> f64 {
        let mx = dists
            .iter()
            .zip(&logw)
            .map(|(d, lw)| lw + a * d)
            .fold(f64::NEG_INFINITY, f64::max);
        mx + dists.iter().zip(&logw).map(|(d, lw)| (lw + a * d - mx).exp()).sum::<f64>().ln()
    };
    let below = |a: f64| {
        let v = log_moment(a);
        v.is_finite() && v <= log_target
    };
    if !below(EXP_RATE_FLOOR) {
        return Err(Error::NoFiniteExponentialMoment);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while below(hi) {
        if hi >= EXP_RATE_CAP {
            return Ok(hi);
        }
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..EXP_RATE_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo.max(EXP_RATE_FLOOR))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point(a: f64, b: f64) -> Law {
        Law::Finite {
            measure: DiscreteMeasure::from_1d(&[a, b], &[0.5, 0.5]).unwrap(),
        }
    }

    #[test]
    fn point_rejects_bad_coordinates() {
        assert!(Point::new(vec![]).is_err());
        assert!(Point::new(vec![1.0, f64::NAN]).is_err());
        assert!(Point::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn measure_validation() {
        assert!(DiscreteMeasure::from_1d(&[0.0, 1.0], &[0.5, 0.4]).is_err());
        assert!(DiscreteMeasure::from_1d(&[0.0, 0.0], &[0.5, 0.5]).is_err());
        assert!(DiscreteMeasure::from_1d(&[0.0, 1.0], &[1.5, -0.5]).is_err());
        assert!(DiscreteMeasure::from_1d(&[0.0], &[0.5, 0.5]).is_err());
        let merged =
            DiscreteMeasure::from_weighted_points(vec![Point::scalar(1.0), Point::scalar(1.0 + 1e-13)], vec![0.5, 0.5])
                .unwrap();
        assert_eq!(merged.len(), 1);
        assert_eq!(merged.weights(), &[1.0]);
    }

    #[test]
    fn empirical_of_point_mass() {
        let s = Sampler::new(
            Law::Finite {
                measure: DiscreteMeasure::dirac(Point::scalar(0.0)),
            },
            1,
        );
        let m = s.sample_empirical(5).unwrap();
        assert_eq!(m.support(), &[Point::scalar(0.0)]);
        assert_eq!(m.weights(), &[1.0]);
    }

    #[test]
    fn empirical_weights_are_multiples_of_one_over_n() {
        let s = Sampler::new(two_point(0.0, 1.0), 42);
        let m = s.sample_empirical(4).unwrap();
        let total: f64 = m.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-15);
        for w in m.weights() {
            let k = w * 4.0;
            assert!((k - k.round()).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_sample_mean_is_near_zero() {
        // one standard error of the mean is 1/√n; 4/√n gives a rare-failure margin
        let n = 10_000;
        for seed in 0..5 {
            let s = Sampler::new(Law::standard_gaussian(1), seed);
            let m = s.sample_empirical(n).unwrap();
            let mean = m.integrate(|p| p.x());
            assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "seed {seed}: mean {mean}");
        }
    }

    #[test]
    fn identical_seed_reproduces_stream() {
        let s = Sampler::new(Law::BrownianPath { grid_size: 16 }, 9);
        assert_eq!(s.draw_n(3), s.draw_n(3));
        assert_ne!(s.draw_n(1), s.split(1).draw_n(1));
    }

    #[test]
    fn m1_examples() {
        let x0 = Point::scalar(0.0);
        let e = Metric::Euclidean;
        let dirac = Sampler::new(
            Law::Finite {
                measure: DiscreteMeasure::dirac(x0.clone()),
            },
            0,
        );
        assert_eq!(estimate_m1(&dirac, &x0, &e, 100).mean, 0.0);
        let two = Sampler::new(two_point(0.0, 2.0), 0);
        assert!((estimate_m1(&two, &x0, &e, 100).mean - 1.0).abs() < 1e-15);
        // half-normal mean √(2/π)
        let g = Sampler::new(Law::standard_gaussian(1), 3);
        let est = estimate_m1(&g, &x0, &e, 100_000);
        let exact = (2.0 / std::f64::consts::PI).sqrt();
        assert!((est.mean - exact).abs() < 4.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn exp_rate_examples() {
        let x0 = Point::scalar(0.0);
        let e = Metric::Euclidean;
        let dirac = Sampler::new(
            Law::Finite {
                measure: DiscreteMeasure::dirac(x0.clone()),
            },
            0,
        );
        assert!(find_exp_rate(&dirac, &x0, &e, 2.0).unwrap() >= EXP_RATE_CAP);
        // ½ + ½ e^a = 2
        let a = find_exp_rate(&Sampler::new(two_point(0.0, 1.0), 0), &x0, &e, 2.0).unwrap();
        assert!((a - 3f64.ln()).abs() < 1e-12, "{a}");
        // Exp(λ): λ / (λ − a) = 2 at a = λ/2
        let exp = Sampler::new(Law::ExponentialTail { rate: 3.0 }, 5);
        let a = find_exp_rate(&exp, &x0, &e, 2.0).unwrap();
        assert!((a - 1.5).abs() < 0.05, "{a}");
        assert!(find_exp_rate(&exp, &x0, &e, 1.0).is_err());
    }

    #[test]
    fn holder_norm_examples() {
        assert_eq!(holder_norm(&Point::new(vec![3.0; 8]).unwrap(), 0.5).unwrap(), 0.0);
        assert_eq!(holder_norm(&Point::new(vec![0.0, 1.0]).unwrap(), 1.0).unwrap(), 1.0);
        let v = holder_norm(&Point::new(vec![0.0, 1.0, 0.0]).unwrap(), 0.5).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(holder_norm(&Point::scalar(1.0), 0.5), Err(Error::GridTooSmall(1))));
        assert!(holder_norm(&Point::new(vec![0.0, 1.0]).unwrap(), 0.0).is_err());
    }

    #[test]
    fn mixture_of_finite_laws_is_finite() {
        let law = Law::Mixture {
            components: vec![(1.0, two_point(0.0, 1.0)), (3.0, two_point(1.0, 2.0))],
        };
        let m = law.as_finite().unwrap();
        assert_eq!(m.len(), 3);
        assert!((m.weights()[1] - 0.5).abs() < 1e-15);
    }
}
