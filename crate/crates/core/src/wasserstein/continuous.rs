//! W₁ between a 1-D discrete measure and a continuous reference law.
//!
//! `∫|F_n − F|` splits at the sorted atoms into two tails and finitely many
//! intervals on which `F_n` is a constant `c`; on each interval the root of
//! `F = c` is isolated and `|c − F|` is integrated on both sides of it.

use std::sync::Arc;

use crate::measure::DiscreteMeasure;
use crate::numeric::{adaptive_simpson, bisect, compensated_sum, normal_cdf, normal_pdf, normal_quantile, normal_sf};
use crate::{Error, Result};

/// A continuous distribution function on the line.
pub trait ReferenceCdf {
    fn cdf(&self, x: f64) -> f64;
    /// `∫_{−∞}^x F`.
    fn left_tail(&self, x: f64) -> f64;
    /// `∫_x^∞ (1 − F)`.
    fn right_tail(&self, x: f64) -> f64;
    /// `∫_p^q (F − c)` for `p ≤ q`.
    fn excess(&self, c: f64, p: f64, q: f64) -> f64;
    /// Root of `F(x) = c` inside `(p, q)`, given `F(p) < c < F(q)`.
    fn level_crossing(&self, c: f64, p: f64, q: f64) -> f64 {
        bisect(|x| self.cdf(x) - c, p, q, 200)
    }
    /// Fails if `F` is seen to leave `[0, 1]` or to decrease.
    fn check(&self, _probes: &[f64]) -> Result<()> {
        Ok(())
    }
}

/// `N(mean, sd²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianCdf {
    pub mean: f64,
    pub sd: f64,
}

impl GaussianCdf {
    pub fn standard() -> Self {
        GaussianCdf { mean: 0.0, sd: 1.0 }
    }

    fn z(&self, x: f64) -> f64 {
        (x - self.mean) / self.sd
    }

    // ∫_{−∞}^x Φ((u−m)/s) du = (x−m)Φ(z) + s φ(z)
    fn primitive(&self, x: f64) -> f64 {
        let z = self.z(x);
        (x - self.mean) * normal_cdf(z) + self.sd * normal_pdf(z)
    }
}

impl ReferenceCdf for GaussianCdf {
    fn cdf(&self, x: f64) -> f64 {
        normal_cdf(self.z(x))
    }
    fn left_tail(&self, x: f64) -> f64 {
        self.primitive(x)
    }
    fn right_tail(&self, x: f64) -> f64 {
        let z = self.z(x);
        self.sd * normal_pdf(z) - (x - self.mean) * normal_sf(z)
    }
    fn excess(&self, c: f64, p: f64, q: f64) -> f64 {
        // relative to whichever end keeps the primitive small
        if self.z(p) > 0.0 {
            // ∫(F − c) = ∫(1 − c) − ∫(1 − F)
            (1.0 - c) * (q - p) - (self.right_tail(p) - self.right_tail(q))
        } else {
            self.primitive(q) - self.primitive(p) - c * (q - p)
        }
    }
    fn level_crossing(&self, c: f64, _p: f64, _q: f64) -> f64 {
        self.mean + self.sd * normal_quantile(c)
    }
}

/// Uniform on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformCdf {
    pub lo: f64,
    pub hi: f64,
}

impl UniformCdf {
    pub fn unit() -> Self {
        UniformCdf { lo: 0.0, hi: 1.0 }
    }
}

impl ReferenceCdf for UniformCdf {
    fn cdf(&self, x: f64) -> f64 {
        ((x - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }
    fn left_tail(&self, x: f64) -> f64 {
        let w = self.hi - self.lo;
        if x <= self.lo {
            0.0
        } else if x <= self.hi {
            (x - self.lo) * (x - self.lo) / (2.0 * w)
        } else {
            w / 2.0 + (x - self.hi)
        }
    }
    fn right_tail(&self, x: f64) -> f64 {
        let w = self.hi - self.lo;
        if x >= self.hi {
            0.0
        } else if x >= self.lo {
            (self.hi - x) * (self.hi - x) / (2.0 * w)
        } else {
            w / 2.0 + (self.lo - x)
        }
    }
    fn excess(&self, c: f64, p: f64, q: f64) -> f64 {
        self.left_tail(q) - self.left_tail(p) - c * (q - p)
    }
    fn level_crossing(&self, c: f64, _p: f64, _q: f64) -> f64 {
        self.lo + c * (self.hi - self.lo)
    }
}

/// A user-supplied distribution function, 0 below `lo` and 1 above `hi`,
/// integrated by adaptive quadrature.
#[derive(Clone)]
pub struct FnCdf {
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
}

impl FnCdf {
    pub fn new<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F, lo: f64, hi: f64) -> Self {
        FnCdf {
            f: Arc::new(f),
            lo,
            hi,
            tol: 1e-11,
        }
    }
}

impl ReferenceCdf for FnCdf {
    fn cdf(&self, x: f64) -> f64 {
        if x <= self.lo {
            0.0
        } else if x >= self.hi {
            1.0
        } else {
            (self.f)(x)
        }
    }
    fn left_tail(&self, x: f64) -> f64 {
        adaptive_simpson(&|u| self.cdf(u), self.lo, x.min(self.hi), self.tol) + (x - self.hi).max(0.0)
    }
    fn right_tail(&self, x: f64) -> f64 {
        adaptive_simpson(&|u| 1.0 - self.cdf(u), x.max(self.lo), self.hi, self.tol) + (self.lo - x).max(0.0)
    }
    fn excess(&self, c: f64, p: f64, q: f64) -> f64 {
        adaptive_simpson(&|u| self.cdf(u) - c, p, q, self.tol)
    }
    fn check(&self, probes: &[f64]) -> Result<()> {
        const GRID: usize = 4096;
        let mut xs: Vec<f64> = (0..=GRID)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / GRID as f64)
            .chain(probes.iter().copied())
            .collect();
        xs.sort_by(f64::total_cmp);
        let mut prev = 0.0;
        for x in xs {
            let v = self.cdf(x);
            if !(0.0..=1.0).contains(&v) || v < prev - 1e-12 {
                return Err(Error::NonMonotoneCdf { x });
            }
            prev = v;
        }
        Ok(())
    }
}

/// Exact `∫ |F_emp − F|` for a 1-D discrete measure against a reference law.
pub fn w1_vs_continuous_1d<C: ReferenceCdf + ?Sized>(emp: &DiscreteMeasure, cdf: &C) -> Result<f64> {
    if let Some(p) = emp.support().iter().find(|p| p.dim() != 1) {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: p.dim(),
        });
    }
    let mut atoms: Vec<(f64, f64)> = emp.iter().map(|(p, w)| (p.x(), w)).collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let xs: Vec<f64> = atoms.iter().map(|a| a.0).collect();
    cdf.check(&xs)?;

    let mut terms = Vec::with_capacity(2 * atoms.len() + 2);
    terms.push(cdf.left_tail(xs[0]));
    let mut level = 0.0;
    for k in 0..atoms.len() - 1 {
        level += atoms[k].1;
        let c = level.min(1.0);
        let (p, q) = (xs[k], xs[k + 1]);
        let (fp, fq) = (cdf.cdf(p), cdf.cdf(q));
        if fp >= c {
            terms.push(cdf.excess(c, p, q));
        } else if fq <= c {
            terms.push(-cdf.excess(c, p, q));
        } else {
            let r = cdf.level_crossing(c, p, q).clamp(p, q);
            terms.push(-cdf.excess(c, p, r));
            terms.push(cdf.excess(c, r, q));
        }
    }
    terms.push(cdf.right_tail(xs[xs.len() - 1]));
    Ok(compensated_sum(terms))
}
