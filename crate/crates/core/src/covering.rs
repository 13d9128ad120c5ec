//! Covering numbers: closed-form bounds (Euclidean balls, Hölder balls,
//! Lipschitz classes) and constructive covers of finite metric spaces,
//! including the spanning-tree net of 1-Lipschitz functions.
//!
//! Formulas that can overflow return natural logarithms.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::measure::{Metric, Point};
use crate::{Error, Result};

// Slack for floors of ratios such as 3R/ε that are integers on paper.
const FLOOR_SLACK: f64 = 1e-9;

fn floor_ratio(x: f64) -> f64 {
    (x * (1.0 + FLOOR_SLACK)).floor()
}

/// A finite set of points with a metric and a base point `x₀ = points[base_index]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    pub points: Vec<Point>,
    pub metric: Metric,
    pub base_index: usize,
}

impl FiniteMetricSpace {
    pub fn new(points: Vec<Point>, metric: Metric, base_index: usize) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidMeasure("metric space has no points".into()));
        }
        if base_index >= points.len() {
            return Err(Error::config("base_index", format!("{base_index} out of range")));
        }
        let dim = points[0].dim();
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
        }
        metric.validate()?;
        Ok(FiniteMetricSpace {
            points,
            metric,
            base_index,
        })
    }

    /// Points of the real line with base point at index 0.
    pub fn on_line(xs: &[f64]) -> Result<Self> {
        let pts = xs.iter().map(|&x| Point::new(vec![x])).collect::<Result<Vec<_>>>()?;
        FiniteMetricSpace::new(pts, Metric::Euclidean, 0)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.metric.distance(&self.points[i], &self.points[j])
    }

    /// `R = max_x d(x, x₀)`.
    pub fn radius(&self) -> f64 {
        (0..self.len()).map(|i| self.d(i, self.base_index)).fold(0.0, f64::max)
    }
}

/// A cover of a finite space by closed balls around some of its points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverResult {
    /// Indices of the centers, in order of selection.
    pub centers: Vec<usize>,
    pub radius: f64,
    pub count: usize,
    /// `cell[i]` is the position in `centers` of the first center within `radius` of point `i`.
    pub cell: Vec<usize>,
}

impl CoverResult {
    pub fn covers(&self, space: &FiniteMetricSpace) -> bool {
        (0..space.len()).all(|i| self.centers.iter().any(|&c| space.d(i, c) <= self.radius))
    }
}

/// Farthest-point greedy cover starting at the base point.
///
/// Centers end up pairwise more than `delta` apart, so no closed `delta/2`-ball
/// holds two of them; the count never exceeds the minimal cover at radius `delta/2`.
pub fn greedy_cover(space: &FiniteMetricSpace, delta: f64) -> Result<CoverResult> {
    if !(delta > 0.0) {
        return Err(Error::DomainError(format!("cover radius {delta} must be positive")));
    }
    let n = space.len();
    let mut centers = vec![space.base_index];
    let mut gap: Vec<f64> = (0..n).map(|i| space.d(i, space.base_index)).collect();
    loop {
        let (far, d) = gap
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
        if d <= delta {
            break;
        }
        centers.push(far);
        for (i, g) in gap.iter_mut().enumerate() {
            *g = g.min(space.d(i, far));
        }
    }
    let cell = (0..n)
        .map(|i| centers.iter().position(|&c| space.d(i, c) <= delta).expect("greedy cover is a cover"))
        .collect();
    Ok(CoverResult {
        count: centers.len(),
        centers,
        radius: delta,
        cell,
    })
}

/// `(1 + 2R/δ)^d`, the volume bound for covering a Euclidean `R`-ball by `δ`-balls.
pub fn n_euclidean_ball(r: f64, delta: f64, d: usize) -> f64 {
    log_n_euclidean_ball(r, delta, d).exp()
}

pub fn log_n_euclidean_ball(r: f64, delta: f64, d: usize) -> f64 {
    d as f64 * (2.0 * r / delta).ln_1p()
}

/// Natural log of `10 (R/δ) exp[log 3 · 5^{1/α} (R/δ)^{1/α}]`, the covering bound
/// of the α-Hölder ball of radius `R`.
pub fn n_holder_ball(r: f64, delta: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::DomainError(format!("Hölder exponent {alpha} outside (0, 1]")));
    }
    if !(r > 0.0 && delta > 0.0) {
        return Err(Error::DomainError("radius and scale must be positive".into()));
    }
    let ratio = r / delta;
    let p = 1.0 / alpha;
    Ok(10f64.ln() + ratio.ln() + 3f64.ln() * 5f64.powf(p) * ratio.powf(p))
}

/// Natural log of `(2 + 2⌊3R/ε⌋)^{n_K}` with `n_K = 𝒩(K, ε/3)`.
pub fn n_lipschitz_crude(n_k: f64, r: f64, eps: f64) -> f64 {
    n_k * (2.0 + 2.0 * floor_ratio(3.0 * r / eps)).ln()
}

/// Natural log of `(2 + 2⌊4R/ε⌋) · 2^{n_K}` with `n_K = 𝒩(K, ε/16)`, for connected `K`.
pub fn n_lipschitz_tree(n_k: f64, r: f64, eps: f64) -> f64 {
    (2.0 + 2.0 * floor_ratio(4.0 * r / eps)).ln() + n_k * std::f64::consts::LN_2
}

/// `θ(x) = 32x log[2(32x log 32x − 32x + 1)]`.
pub fn theta(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::DomainError(format!("θ needs x > 0, got {x}")));
    }
    let y = 32.0 * x;
    let inner = 2.0 * (y * y.ln() - y + 1.0);
    if !(inner > 1.0) {
        return Err(Error::DomainError(format!("θ({x}): log argument {inner} is not above 1")));
    }
    Ok(y * inner.ln())
}

/// The net of 1-Lipschitz functions built on a spanning tree of the cover graph.
///
/// Cover cells `C_1, …, C_n` come from a greedy `ε`-cover with representatives
/// `y_i` (the centers). Cells are adjacent when their representatives are
/// within `4ε`, the only property of intersecting balls the approximation
/// argument uses; on a connected space this graph contains the graph of
/// intersecting balls. A net element is fixed by a sign per tree edge (the value
/// steps by `±4ε` from parent to child, starting from 0 at the base cell) and a
/// shift `4kε`, and is extended to every point by
/// `h(x) = min_i g(a_i) + d(x, y_i)` so that each element is 1-Lipschitz.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeNet {
    pub eps: f64,
    pub cover: CoverResult,
    /// BFS parent of each cover cell; `None` for the root.
    pub parent: Vec<Option<usize>>,
    /// Cells in BFS order.
    pub order: Vec<usize>,
    /// Admissible shift indices `k`, with shift `4kε`.
    pub shifts: Vec<i64>,
    /// Covering radius certified by the construction.
    pub radius: f64,
    /// `R = max_x d(x, x₀)`.
    pub r: f64,
    dist_to_rep: Vec<Vec<f64>>,
}

impl TreeNet {
    /// Number of sign patterns, `2^{n−1}`.
    pub fn patterns(&self) -> u64 {
        1u64 << (self.cover.count - 1)
    }

    /// Number of net elements.
    pub fn count(&self) -> u64 {
        self.patterns() * self.shifts.len() as u64
    }

    /// `(2 + 2⌊4R/ε⌋) · 2^n`.
    pub fn size_cap(&self) -> f64 {
        (2.0 + 2.0 * floor_ratio(4.0 * self.r / self.eps)) * 2f64.powi(self.cover.count as i32)
    }

    /// Tree values on the cells for a sign pattern; bit `e` of `pattern`
    /// gives the sign of the edge into the `(e + 1)`-th cell in BFS order.
    pub fn tree_values(&self, pattern: u64) -> Vec<f64> {
        let n = self.cover.count;
        let mut g = vec![0.0; n];
        for (e, &cell) in self.order.iter().enumerate().skip(1) {
            let p = self.parent[cell].expect("non-root cell has a parent");
            let up = (pattern >> (e - 1)) & 1 == 1;
            g[cell] = g[p] + if up { 4.0 * self.eps } else { -4.0 * self.eps };
        }
        g
    }

    fn extend(&self, g: &[f64]) -> Vec<f64> {
        self.dist_to_rep
            .iter()
            .map(|row| row.iter().zip(g).map(|(d, gi)| gi + d).fold(f64::INFINITY, f64::min))
            .collect()
    }

    /// Values of a net element on the points of the space.
    pub fn element(&self, pattern: u64, shift: i64) -> Vec<f64> {
        let base = self.extend(&self.tree_values(pattern));
        let s = 4.0 * shift as f64 * self.eps;
        base.into_iter().map(|v| v + s).collect()
    }

    /// Sup distance from `f` to the nearest net element, by enumerating every
    /// sign pattern and choosing the best shift for each.
    pub fn distance(&self, f: &[f64]) -> f64 {
        let (kmin, kmax) = (*self.shifts.first().unwrap(), *self.shifts.last().unwrap());
        let mut best = f64::INFINITY;
        for pattern in 0..self.patterns() {
            let h = self.extend(&self.tree_values(pattern));
            let (lo, hi) = f
                .iter()
                .zip(&h)
                .map(|(a, b)| a - b)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
            let centre = 0.5 * (lo + hi) / (4.0 * self.eps);
            for k in [centre.floor() as i64, centre.ceil() as i64] {
                let k = k.clamp(kmin, kmax);
                let s = 4.0 * k as f64 * self.eps;
                best = best.min((hi - s).max(s - lo));
            }
        }
        best
    }

    /// The element picked by the leaf-by-leaf rule: moving down the tree, step
    /// by `+4ε` when `f(y_child) − g(parent) ≥ 0` and by `−4ε` otherwise, after
    /// rounding `f(y_1)` to the shift grid. Returns `(pattern, shift)`.
    pub fn approximant(&self, f: &[f64]) -> (u64, i64) {
        let reps = &self.cover.centers;
        let f1 = f[reps[0]];
        let k = (f1 / (4.0 * self.eps)).round() as i64;
        let k = k.clamp(*self.shifts.first().unwrap(), *self.shifts.last().unwrap());
        let n = self.cover.count;
        let mut g = vec![0.0; n];
        let mut pattern = 0u64;
        for (e, &cell) in self.order.iter().enumerate().skip(1) {
            let p = self.parent[cell].unwrap();
            let up = f[reps[cell]] - f1 - g[p] >= 0.0;
            g[cell] = g[p] + if up { 4.0 * self.eps } else { -4.0 * self.eps };
            if up {
                pattern |= 1 << (e - 1);
            }
        }
        (pattern, k)
    }
}

/// Largest cover for which [`enumerate_tree_net`] will enumerate sign patterns.
pub const MAX_TREE_CELLS: usize = 24;

/// Builds the spanning-tree net of 1-Lipschitz functions on `space` at scale `eps`.
pub fn enumerate_tree_net(space: &FiniteMetricSpace, eps: f64) -> Result<TreeNet> {
    let cover = greedy_cover(space, eps)?;
    let n = cover.count;
    if n > MAX_TREE_CELLS {
        return Err(Error::config("eps", format!("{n} cover cells exceed the enumeration limit {MAX_TREE_CELLS}")));
    }
    let c = &cover.centers;
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for v in 0..n {
            if !seen[v] && space.d(c[u], c[v]) <= 4.0 * eps * (1.0 + FLOOR_SLACK) {
                seen[v] = true;
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    if order.len() < n {
        return Err(Error::DisconnectedGraph { centers: n });
    }
    let r = space.radius();
    let m = floor_ratio(r / (4.0 * eps)) as i64;
    let shifts = (-m - 1..=m).collect();
    let dist_to_rep = (0..space.len()).map(|i| c.iter().map(|&y| space.d(i, y)).collect()).collect();
    Ok(TreeNet {
        eps,
        cover,
        parent,
        order,
        shifts,
        radius: 16.0 * eps,
        r,
        dist_to_rep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // smallest number of centers chosen among the points whose delta-balls cover the space
    fn exact_cover(space: &FiniteMetricSpace, delta: f64) -> usize {
        let n = space.len();
        for k in 1..=n {
            let mut idx: Vec<usize> = (0..k).collect();
            loop {
                if (0..n).all(|i| idx.iter().any(|&c| space.d(i, c) <= delta)) {
                    return k;
                }
                // next k-combination
                let mut p = k;
                while p > 0 && idx[p - 1] == n - k + p - 1 {
                    p -= 1;
                }
                if p == 0 {
                    break;
                }
                idx[p - 1] += 1;
                for q in p..k {
                    idx[q] = idx[q - 1] + 1;
                }
            }
        }
        n
    }

    #[test]
    fn greedy_examples() {
        let s = FiniteMetricSpace::on_line(&[0.0, 0.1, 0.2]).unwrap();
        assert_eq!(greedy_cover(&s, 0.5).unwrap().count, 1);
        let s = FiniteMetricSpace::on_line(&[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(greedy_cover(&s, 0.5).unwrap().count, 3);
        assert_eq!(exact_cover(&s, 0.5), 3);
        let s = FiniteMetricSpace::on_line(&[0.0, 0.4, 1.0, 1.4]).unwrap();
        let c = greedy_cover(&s, 0.5).unwrap();
        assert_eq!(c.count, 2);
        assert!(c.covers(&s));
        assert_eq!(exact_cover(&s, 0.5), 2);
    }

    #[test]
    fn euclidean_ball_examples() {
        assert!((n_euclidean_ball(1.0, 1.0, 2) - 9.0).abs() < 1e-12);
        assert!((n_euclidean_ball(0.1, 1.0, 3) - 1.728).abs() < 1e-12);
        assert!((n_euclidean_ball(2.0, 1.0, 1) - 5.0).abs() < 1e-12);
        // greedy cover of a fine grid of the unit disc stays below the bound
        let mut pts = Vec::new();
        for i in -20..=20 {
            for j in -20..=20 {
                let (x, y) = (i as f64 / 20.0, j as f64 / 20.0);
                if x * x + y * y <= 1.0 {
                    pts.push(Point::new(vec![x, y]).unwrap());
                }
            }
        }
        let s = FiniteMetricSpace::new(pts, Metric::Euclidean, 0).unwrap();
        assert!(greedy_cover(&s, 1.0).unwrap().count as f64 <= 9.0);
    }

    #[test]
    fn holder_ball_examples() {
        let v = n_holder_ball(1.0, 1.0, 0.5).unwrap();
        assert!((v - (10f64.ln() + 25.0 * 3f64.ln())).abs() < 1e-12);
        let v = n_holder_ball(2.0, 1.0, 1.0).unwrap();
        assert!((v - (20.0 * 3f64.powi(10)).ln()).abs() < 1e-12);
        assert!(n_holder_ball(1.0, 1.0, 0.4).unwrap() < n_holder_ball(1.1, 1.0, 0.4).unwrap());
    }

    #[test]
    fn lipschitz_formula_examples() {
        let eps = 0.3;
        assert!((n_lipschitz_crude(1.0, eps / 3.0, eps) - 4f64.ln()).abs() < 1e-15);
        assert!((n_lipschitz_crude(5.0, 0.09, eps) - 5.0 * 2f64.ln()).abs() < 1e-15);
        assert!((n_lipschitz_crude(2.0, eps, eps) - 2.0 * 8f64.ln()).abs() < 1e-15);
        assert!((n_lipschitz_tree(3.0, 0.07, eps) - 4.0 * 2f64.ln()).abs() < 1e-15);
        assert!((n_lipschitz_tree(10.0, eps, eps) - (10f64.ln() + 10.0 * 2f64.ln())).abs() < 1e-15);
        // crude grows like n_K log(R/ε), tree like n_K log 2
        assert!(n_lipschitz_tree(1000.0, 10.0, 0.1) < n_lipschitz_crude(1000.0, 10.0, 0.1));
    }

    #[test]
    fn theta_examples() {
        let x = std::f64::consts::E / 32.0;
        assert!((theta(x).unwrap() - std::f64::consts::E * 2f64.ln()).abs() < 1e-13);
        let expected = 32.0 * (2.0 * (32.0 * 32f64.ln() - 31.0)).ln();
        assert!((theta(1.0).unwrap() - expected).abs() < 1e-12);
        assert!(theta(2.0).unwrap() > theta(1.0).unwrap());
        assert!(matches!(theta(1.0 / 32.0), Err(Error::DomainError(_))));
    }

    #[test]
    fn tree_net_examples() {
        let single = FiniteMetricSpace::on_line(&[0.0, 0.05, 0.1]).unwrap();
        let net = enumerate_tree_net(&single, 0.2).unwrap();
        assert_eq!(net.patterns(), 1);
        assert_eq!(net.shifts, vec![-1, 0]);
        let path = FiniteMetricSpace::on_line(&[0.0, 1.0, 2.0]).unwrap();
        let net = enumerate_tree_net(&path, 0.5).unwrap();
        assert_eq!(net.cover.count, 3);
        assert_eq!(net.patterns(), 4);
        assert!(net.count() as f64 <= net.size_cap());
        let gap = FiniteMetricSpace::on_line(&[0.0, 2.5]).unwrap();
        assert!(matches!(enumerate_tree_net(&gap, 0.5), Err(Error::DisconnectedGraph { .. })));
    }

    #[test]
    fn leaf_rule_stays_within_radius() {
        let xs: Vec<f64> = (0..12).map(|i| i as f64 / 11.0).collect();
        let space = FiniteMetricSpace::on_line(&xs).unwrap();
        let net = enumerate_tree_net(&space, 0.1).unwrap();
        // every ±1-slope zigzag through the grid
        for signs in 0u32..(1 << 11) {
            let mut f = vec![0.0; 12];
            for i in 1..12 {
                let s = if (signs >> (i - 1)) & 1 == 1 { 1.0 } else { -1.0 };
                f[i] = f[i - 1] + s / 11.0;
            }
            let (p, k) = net.approximant(&f);
            let h = net.element(p, k);
            let d = f.iter().zip(&h).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(d <= net.radius, "pattern {signs}: {d}");
            assert!(net.distance(&f) <= d + 1e-12);
        }
    }
}
