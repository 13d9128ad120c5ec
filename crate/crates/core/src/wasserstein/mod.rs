//! Exact W₁ between finitely supported measures, dual certificates, the
//! keep-in-place coupling and k-median quantization.
//!
//! [`w1_exact`] always solves the transport problem; [`w1`] routes 1-D
//! Euclidean inputs to the CDF formula [`w1_1d`] and everything else to the
//! solver.

mod continuous;
mod flow;
mod quantize;

use serde::{Deserialize, Serialize};

pub use continuous::{w1_vs_continuous_1d, FnCdf, GaussianCdf, ReferenceCdf, UniformCdf};
pub use flow::COST_RESOLUTION;
pub use quantize::{quantize, Quantization};

use crate::measure::{DiscreteMeasure, Metric, Point};
use crate::numeric::compensated_sum;
use crate::{Error, Result};

/// Marginal tolerance of a [`Coupling`].
pub const MARGINAL_TOLERANCE: f64 = 1e-10;

/// A transport plan between two discrete measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub row_measure: DiscreteMeasure,
    pub col_measure: DiscreteMeasure,
    /// `plan[i][j]` is the mass moved from row point `i` to column point `j`.
    pub plan: Vec<Vec<f64>>,
}

impl Coupling {
    pub fn cost(&self, metric: &Metric) -> f64 {
        let rows = self.row_measure.support();
        let cols = self.col_measure.support();
        compensated_sum(self.plan.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(move |(j, &p)| p * metric.distance(&rows[i], &cols[j]))
        }))
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.plan.iter().map(|r| compensated_sum(r.iter().copied())).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let m = self.col_measure.len();
        (0..m).map(|j| compensated_sum(self.plan.iter().map(|r| r[j]))).collect()
    }

    /// Largest deviation of the plan's marginals from the two measures.
    pub fn marginal_error(&self) -> f64 {
        let rows = self.row_sums().into_iter().zip(self.row_measure.weights());
        let cols = self.col_sums().into_iter().zip(self.col_measure.weights());
        rows.chain(cols).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn is_valid(&self) -> bool {
        self.plan.iter().flatten().all(|&p| p >= 0.0) && self.marginal_error() <= MARGINAL_TOLERANCE
    }
}

/// A candidate potential on the union of two supports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub f_values: Vec<(Point, f64)>,
    /// `W₁ − (∫f dμ − ∫f dν)` when produced by [`kantorovich_potential`].
    pub gap: f64,
}

impl DualCertificate {
    pub fn from_fn<F: Fn(&Point) -> f64>(mu: &DiscreteMeasure, nu: &DiscreteMeasure, f: F) -> Self {
        let mut f_values: Vec<(Point, f64)> = Vec::new();
        for p in mu.support().iter().chain(nu.support()) {
            if !f_values.iter().any(|(q, _)| q.coincides(p)) {
                f_values.push((p.clone(), f(p)));
            }
        }
        DualCertificate { f_values, gap: f64::NAN }
    }

    pub fn value(&self, p: &Point) -> Option<f64> {
        self.f_values.iter().find(|(q, _)| q.coincides(p)).map(|(_, v)| *v)
    }
}

fn cost_matrix(mu: &DiscreteMeasure, nu: &DiscreteMeasure, metric: &Metric) -> Vec<Vec<f64>> {
    mu.support()
        .iter()
        .map(|x| nu.support().iter().map(|y| metric.distance(x, y)).collect())
        .collect()
}

fn check_dims(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<()> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            found: nu.dim(),
        });
    }
    Ok(())
}

/// Target measure of a deviation experiment.
#[derive(Clone)]
pub enum Reference {
    /// Finite support, compared with [`w1`].
    Discrete(DiscreteMeasure),
    /// A law on the line given by its distribution function, compared with
    /// [`w1_vs_continuous_1d`].
    Analytic(std::sync::Arc<dyn ReferenceCdf + Send + Sync>),
}

impl std::fmt::Debug for Reference {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Reference::Discrete(m) => f.debug_tuple("Discrete").field(&m.len()).finish(),
            Reference::Analytic(_) => f.write_str("Analytic"),
        }
    }
}

impl Reference {
    pub fn analytic<C: ReferenceCdf + Send + Sync + 'static>(cdf: C) -> Self {
        Reference::Analytic(std::sync::Arc::new(cdf))
    }

    /// `W₁(emp, reference)`.
    pub fn distance(&self, emp: &DiscreteMeasure, metric: &Metric) -> Result<f64> {
        match self {
            Reference::Discrete(m) => w1(emp, m, metric),
            Reference::Analytic(c) => w1_vs_continuous_1d(emp, c.as_ref()),
        }
    }
}

/// Optimal transport cost and an optimal plan, by min-cost flow.
pub fn w1_exact(mu: &DiscreteMeasure, nu: &DiscreteMeasure, metric: &Metric) -> Result<(f64, Coupling)> {
    check_dims(mu, nu)?;
    let cost = cost_matrix(mu, nu, metric);
    let sol = flow::transport(&cost, mu.weights(), nu.weights())?;
    let value = compensated_sum(
        sol.plan
            .iter()
            .zip(&cost)
            .flat_map(|(p, c)| p.iter().zip(c).map(|(a, b)| a * b)),
    );
    let coupling = Coupling {
        row_measure: mu.clone(),
        col_measure: nu.clone(),
        plan: sol.plan,
    };
    if coupling.marginal_error() > MARGINAL_TOLERANCE {
        return Err(Error::SolverFailure(format!(
            "plan marginals off by {}",
            coupling.marginal_error()
        )));
    }
    Ok((value, coupling))
}

/// W₁ without the plan: the CDF formula on the line, the flow solver otherwise.
pub fn w1(mu: &DiscreteMeasure, nu: &DiscreteMeasure, metric: &Metric) -> Result<f64> {
    if mu.is_1d() && nu.is_1d() && *metric == Metric::Euclidean {
        w1_1d(mu, nu)
    } else {
        w1_exact(mu, nu, metric).map(|(v, _)| v)
    }
}

fn sorted_atoms(m: &DiscreteMeasure) -> Result<Vec<(f64, f64)>> {
    if let Some(p) = m.support().iter().find(|p| p.dim() != 1) {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: p.dim(),
        });
    }
    let mut atoms: Vec<(f64, f64)> = m.iter().map(|(p, w)| (p.x(), w)).collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(atoms)
}

/// `∫ |F_μ − F_ν|` for measures on the line.
pub fn w1_1d(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    let a = sorted_atoms(mu)?;
    let b = sorted_atoms(nu)?;
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut prev: Option<f64> = None;
    let mut terms = Vec::with_capacity(a.len() + b.len());
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(p), Some(q)) => p.0.min(q.0),
            (Some(p), None) => p.0,
            (None, Some(q)) => q.0,
            (None, None) => unreachable!(),
        };
        if let Some(px) = prev {
            terms.push((fa - fb).abs() * (x - px));
        }
        while i < a.len() && a[i].0 == x {
            fa += a[i].1;
            i += 1;
        }
        while j < b.len() && b[j].0 == x {
            fb += b[j].1;
            j += 1;
        }
        prev = Some(x);
    }
    Ok(compensated_sum(terms))
}

/// An optimal Kantorovich potential, read off the solver's dual variables and
/// extended to the union of supports by `f(z) = min_j d(z, y_j) + g_j`.
pub fn kantorovich_potential(mu: &DiscreteMeasure, nu: &DiscreteMeasure, metric: &Metric) -> Result<DualCertificate> {
    check_dims(mu, nu)?;
    let cost = cost_matrix(mu, nu, metric);
    let sol = flow::transport(&cost, mu.weights(), nu.weights())?;
    let w = compensated_sum(
        sol.plan
            .iter()
            .zip(&cost)
            .flat_map(|(p, c)| p.iter().zip(c).map(|(a, b)| a * b)),
    );
    let g = sol.col_potential;
    let ys = nu.support();
    let extend = |z: &Point| {
        ys.iter()
            .zip(&g)
            .map(|(y, gj)| metric.distance(z, y) + gj)
            .fold(f64::INFINITY, f64::min)
    };
    let mut cert = DualCertificate::from_fn(mu, nu, extend);
    let dual = mu.integrate(|p| cert.value(p).unwrap()) - nu.integrate(|p| cert.value(p).unwrap());
    cert.gap = w - dual;
    Ok(cert)
}

/// `W₁(μ, ν) − (∫f dμ − ∫f dν)` for a 1-Lipschitz certificate `f`.
///
/// Supremum form of Kantorovich-Rubinstein duality, so the gap is nonnegative
/// for every admissible `f` and vanishes at an optimal potential.
pub fn dual_gap(mu: &DiscreteMeasure, nu: &DiscreteMeasure, metric: &Metric, f: &DualCertificate) -> Result<f64> {
    let mut pts: Vec<(&Point, f64)> = Vec::new();
    for p in mu.support().iter().chain(nu.support()) {
        let v = f.value(p).ok_or_else(|| Error::MissingPotential(p.coords().to_vec()))?;
        pts.push((p, v));
    }
    for (i, (p, fp)) in pts.iter().enumerate() {
        for (q, fq) in &pts[i + 1..] {
            let d = metric.distance(p, q);
            let diff = (fp - fq).abs();
            if diff > d * (1.0 + 1e-9) {
                return Err(Error::NotLipschitz { diff, dist: d });
            }
        }
    }
    let w = w1(mu, nu, metric)?;
    let dual = mu.integrate(|p| f.value(p).unwrap()) - nu.integrate(|p| f.value(p).unwrap());
    Ok(w - dual)
}

/// The coupling that leaves `μ(x_i) ∧ ν(x_i)` in place and moves the residual
/// masses as an independent product, with its bound `D(1 − λ)`.
pub fn keep_in_place_coupling(mu: &DiscreteMeasure, nu: &DiscreteMeasure, metric: &Metric) -> Result<(Coupling, f64)> {
    if mu.len() != nu.len() || mu.support().iter().zip(nu.support()).any(|(p, q)| !p.coincides(q)) {
        return Err(Error::SupportMismatch);
    }
    let k = mu.len();
    let kept: Vec<f64> = mu.weights().iter().zip(nu.weights()).map(|(a, b)| a.min(*b)).collect();
    let r: Vec<f64> = mu.weights().iter().zip(&kept).map(|(a, f)| a - f).collect();
    let s: Vec<f64> = nu.weights().iter().zip(&kept).map(|(b, f)| b - f).collect();
    let moved = compensated_sum(r.iter().copied());
    let s_total = compensated_sum(s.iter().copied());
    let mut plan = vec![vec![0.0; k]; k];
    for i in 0..k {
        plan[i][i] = kept[i];
        if s_total > 0.0 {
            for j in 0..k {
                plan[i][j] += r[i] * s[j] / s_total;
            }
        }
    }
    let bound = mu.diameter(metric) * moved;
    let coupling = Coupling {
        row_measure: mu.clone(),
        col_measure: nu.clone(),
        plan,
    };
    Ok((coupling, bound))
}
