//! Dense transportation solver: successive shortest augmenting paths with
//! node potentials over integer-scaled costs.

use crate::{Error, Result};

/// Cost resolution of the integer scaling.
pub const COST_RESOLUTION: f64 = 1e-9;

/// Flow remaining below this is treated as no flow.
const FLOW_EPS: f64 = 1e-15;

// Shortest-path lengths can cover every node once; keep them inside i64.
const MAX_PATH_UNITS: f64 = 4.0e18;

pub(crate) struct FlowSolution {
    pub plan: Vec<Vec<f64>>,
    /// Dual value on each row (source) node, in cost units.
    #[cfg_attr(not(test), allow(dead_code))]
    pub row_potential: Vec<f64>,
    /// Dual value on each column (sink) node, in cost units.
    pub col_potential: Vec<f64>,
}

/// Solves `min Σ c_ij π_ij` over plans with row sums `supply` and column sums
/// `demand`.
///
/// The returned potentials satisfy `row_potential[i] − col_potential[j] ≤ c_ij`
/// up to the cost resolution, with equality wherever the plan is positive.
pub(crate) fn transport(cost: &[Vec<f64>], supply: &[f64], demand: &[f64]) -> Result<FlowSolution> {
    let n = supply.len();
    let m = demand.len();
    let max_cost = cost.iter().flatten().fold(0.0f64, |a, &c| a.max(c.abs()));
    if !max_cost.is_finite() {
        return Err(Error::SolverFailure("non-finite transport cost".into()));
    }
    let nodes = (n + m + 2) as f64;
    let resolution = if max_cost / COST_RESOLUTION * nodes > MAX_PATH_UNITS {
        max_cost * nodes / MAX_PATH_UNITS
    } else {
        COST_RESOLUTION
    };
    let c: Vec<Vec<i64>> = cost
        .iter()
        .map(|row| row.iter().map(|&x| (x / resolution).round() as i64).collect())
        .collect();

    let mut plan = vec![vec![0.0f64; m]; n];
    let mut left = supply.to_vec();
    let mut need = demand.to_vec();
    // potentials: rows 0..n, columns n..n+m, sink at n+m; the source sits at 0
    let mut pot = vec![0i64; n + m + 1];
    for j in 0..m {
        pot[n + j] = (0..n).map(|i| c[i][j]).min().unwrap_or(0);
    }
    pot[n + m] = (0..m).map(|j| pot[n + j]).min().unwrap_or(0);

    const INF: i64 = i64::MAX / 4;
    let mut dist = vec![INF; n + m + 1];
    let mut done = vec![false; n + m];
    let mut pred = vec![usize::MAX; n + m];

    loop {
        let active_rows = left.iter().any(|&s| s > FLOW_EPS);
        let active_cols = need.iter().any(|&d| d > FLOW_EPS);
        if !active_rows || !active_cols {
            break;
        }
        dist.iter_mut().for_each(|d| *d = INF);
        done.iter_mut().for_each(|d| *d = false);
        pred.iter_mut().for_each(|p| *p = usize::MAX);
        for i in 0..n {
            if left[i] > FLOW_EPS {
                dist[i] = -pot[i];
            }
        }
        // dense Dijkstra over rows and columns
        for _ in 0..n + m {
            let mut u = usize::MAX;
            let mut best = INF;
            for (v, &d) in dist[..n + m].iter().enumerate() {
                if !done[v] && d < best {
                    best = d;
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            if u < n {
                let i = u;
                for j in 0..m {
                    let v = n + j;
                    if done[v] {
                        continue;
                    }
                    let nd = best + c[i][j] + pot[i] - pot[v];
                    if nd < dist[v] {
                        dist[v] = nd;
                        pred[v] = i;
                    }
                }
            } else {
                let j = u - n;
                for i in 0..n {
                    if done[i] || plan[i][j] <= FLOW_EPS {
                        continue;
                    }
                    let nd = best - c[i][j] + pot[u] - pot[i];
                    if nd < dist[i] {
                        dist[i] = nd;
                        pred[i] = u;
                    }
                }
            }
        }
        let mut sink_col = usize::MAX;
        let mut sink_dist = INF;
        for j in 0..m {
            if need[j] > FLOW_EPS && dist[n + j] < INF {
                let d = dist[n + j] + pot[n + j] - pot[n + m];
                if d < sink_dist {
                    sink_dist = d;
                    sink_col = j;
                }
            }
        }
        if sink_col == usize::MAX {
            return Err(Error::SolverFailure("no augmenting path; marginals have unequal mass".into()));
        }
        // capped update keeps every residual reduced cost nonnegative
        for v in 0..n + m {
            pot[v] += dist[v].min(sink_dist);
        }
        pot[n + m] += sink_dist;

        let mut amount = need[sink_col];
        let mut v = n + sink_col;
        loop {
            let i = pred[v];
            let ci = pred[i];
            if ci == usize::MAX {
                amount = amount.min(left[i]);
                break;
            }
            amount = amount.min(plan[i][ci - n]);
            v = ci;
        }
        let mut v = n + sink_col;
        loop {
            let i = pred[v];
            plan[i][v - n] += amount;
            let ci = pred[i];
            if ci == usize::MAX {
                left[i] -= amount;
                break;
            }
            plan[i][ci - n] -= amount;
            if plan[i][ci - n] < 0.0 {
                plan[i][ci - n] = 0.0;
            }
            v = ci;
        }
        need[sink_col] -= amount;
    }

    Ok(FlowSolution {
        plan,
        row_potential: pot[..n].iter().map(|&p| -(p as f64) * resolution).collect(),
        col_potential: pot[n..n + m].iter().map(|&p| -(p as f64) * resolution).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng as _, SeedableRng};

    #[test]
    fn potentials_certify_optimality() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.random_range(1..9);
            let m = rng.random_range(1..9);
            let cost: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.random::<f64>() * 5.0).collect()).collect();
            let norm = |v: Vec<f64>| {
                let s: f64 = v.iter().sum();
                v.into_iter().map(|x| x / s).collect::<Vec<_>>()
            };
            let a = norm((0..n).map(|_| rng.random::<f64>() + 0.01).collect());
            let b = norm((0..m).map(|_| rng.random::<f64>() + 0.01).collect());
            let sol = transport(&cost, &a, &b).unwrap();
            let primal: f64 = (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| sol.plan[i][j] * cost[i][j]).sum();
            let dual: f64 = a.iter().zip(&sol.row_potential).map(|(w, u)| w * u).sum::<f64>()
                - b.iter().zip(&sol.col_potential).map(|(w, v)| w * v).sum::<f64>();
            for i in 0..n {
                for j in 0..m {
                    assert!(sol.row_potential[i] - sol.col_potential[j] <= cost[i][j] + 1e-7);
                }
            }
            assert!((primal - dual).abs() < 1e-7, "{primal} vs {dual}");
        }
    }
}
