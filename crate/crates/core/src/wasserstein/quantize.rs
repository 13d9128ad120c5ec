//! k-median quantization of a discrete measure.

use serde::{Deserialize, Serialize};

use crate::measure::{DiscreteMeasure, Metric};
use crate::numeric::compensated_sum;
use crate::Result;

/// Candidate centers are capped at this many support points.
pub const MAX_CANDIDATES: usize = 512;
const MAX_SWAP_ROUNDS: usize = 100;

/// A k-point approximation of a measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantization {
    pub measure: DiscreteMeasure,
    /// `W₁(μ, ν)`.
    pub achieved: f64,
    /// Indices of the centers in the support of `μ`.
    pub centers: Vec<usize>,
}

/// A `k`-point measure close to `μ` in W₁.
///
/// Centers are grown one at a time (best single addition, then best-improvement
/// swaps), so the achieved distance is nonincreasing in `k`. The weights are the
/// masses of the nearest-center cells, which makes the assignment cost the
/// exact W₁ between `μ` and the result.
pub fn quantize(mu: &DiscreteMeasure, k: usize, metric: &Metric) -> Result<Quantization> {
    let n = mu.len();
    let k = k.max(1);
    if k >= n {
        return Ok(Quantization {
            measure: mu.clone(),
            achieved: 0.0,
            centers: (0..n).collect(),
        });
    }
    let pts = mu.support();
    let w = mu.weights();
    let cand = candidate_indices(mu, metric);
    // dist[c][i] = d(candidate c, point i)
    let dist: Vec<Vec<f64>> = cand
        .iter()
        .map(|&c| pts.iter().map(|p| metric.distance(&pts[c], p)).collect())
        .collect();

    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut near = vec![f64::INFINITY; n];
    while chosen.len() < k {
        let best = (0..cand.len())
            .filter(|c| !chosen.contains(c))
            .map(|c| (c, cost_with(&near, &dist[c], w)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let Some((c, _)) = best else { break };
        chosen.push(c);
        for i in 0..n {
            near[i] = near[i].min(dist[c][i]);
        }
        improve_by_swaps(&mut chosen, &dist, w);
        near = nearest(&chosen, &dist, n).0;
    }

    let (near, owner) = nearest(&chosen, &dist, n);
    let mut mass = vec![Vec::new(); chosen.len()];
    for i in 0..n {
        mass[owner[i]].push(w[i]);
    }
    let weights: Vec<f64> = mass.into_iter().map(compensated_sum).collect();
    let support = chosen.iter().map(|&c| pts[cand[c]].clone()).collect();
    let total = compensated_sum(weights.iter().copied());
    let weights = weights.into_iter().map(|x| x / total).collect();
    Ok(Quantization {
        measure: DiscreteMeasure::new(support, weights)?,
        achieved: compensated_sum(near.iter().zip(w).map(|(d, w)| d * w)),
        centers: chosen.iter().map(|&c| cand[c]).collect(),
    })
}

fn cost_with(near: &[f64], d: &[f64], w: &[f64]) -> f64 {
    compensated_sum(near.iter().zip(d).zip(w).map(|((a, b), w)| w * a.min(*b)))
}

// (distance to nearest chosen center, its position in `chosen`)
fn nearest(chosen: &[usize], dist: &[Vec<f64>], n: usize) -> (Vec<f64>, Vec<usize>) {
    let mut near = vec![f64::INFINITY; n];
    let mut owner = vec![0usize; n];
    for (pos, &c) in chosen.iter().enumerate() {
        for i in 0..n {
            if dist[c][i] < near[i] {
                near[i] = dist[c][i];
                owner[i] = pos;
            }
        }
    }
    (near, owner)
}

fn improve_by_swaps(chosen: &mut [usize], dist: &[Vec<f64>], w: &[f64]) {
    let n = w.len();
    for _ in 0..MAX_SWAP_ROUNDS {
        let (near, owner) = nearest(chosen, dist, n);
        let current = compensated_sum(near.iter().zip(w).map(|(d, w)| d * w));
        // second-nearest distances, so removing a center costs O(n)
        let mut second = vec![f64::INFINITY; n];
        for (pos, &c) in chosen.iter().enumerate() {
            for i in 0..n {
                if pos != owner[i] {
                    second[i] = second[i].min(dist[c][i]);
                }
            }
        }
        let mut best: Option<(usize, usize, f64)> = None;
        for pos in 0..chosen.len() {
            let without: Vec<f64> = (0..n).map(|i| if owner[i] == pos { second[i] } else { near[i] }).collect();
            for q in 0..dist.len() {
                if chosen.contains(&q) {
                    continue;
                }
                let c = cost_with(&without, &dist[q], w);
                if c < best.map_or(current, |b| b.2) - 1e-12 * current.max(1e-300) {
                    best = Some((pos, q, c));
                }
            }
        }
        match best {
            Some((pos, q, _)) => chosen[pos] = q,
            None => return,
        }
    }
}

// All support points, or a farthest-point traversal of them when there are many.
fn candidate_indices(mu: &DiscreteMeasure, metric: &Metric) -> Vec<usize> {
    let n = mu.len();
    if n <= MAX_CANDIDATES {
        return (0..n).collect();
    }
    let pts = mu.support();
    let start = (0..n).max_by(|&a, &b| mu.weights()[a].total_cmp(&mu.weights()[b])).unwrap();
    let mut out = vec![start];
    let mut gap: Vec<f64> = pts.iter().map(|p| metric.distance(p, &pts[start])).collect();
    while out.len() < MAX_CANDIDATES {
        let (far, d) = gap.iter().enumerate().fold((0, -1.0), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
        if d <= 0.0 {
            break;
        }
        out.push(far);
        for (i, p) in pts.iter().enumerate() {
            gap[i] = gap[i].min(metric.distance(p, &pts[far]));
        }
    }
    out
}
