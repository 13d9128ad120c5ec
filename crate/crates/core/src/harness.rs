//! Experiment configuration, Monte-Carlo deviation frequencies and
//! bound-versus-empirical comparison tables.
//!
//! A run draws, for every `n` in the grid, `trials` independent empirical
//! measures (or chain occupation measures), computes their W₁ distance to the
//! reference once, and thresholds those distances at every `t`. Trial `k` of the
//! `c`-th entry of `n_grid` uses the seed `derive(seed, c, k)`.

use std::f64::consts::LN_2;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    bound_rd, bound_t1, bound_variant, concentration_around_mean, json_float, mean_bound_quantized, BoundReport, RdConstants, Witness,
};
use crate::markov::{ar1_m1, ar1_stationary, bound_markov_with, default_markov_c_d, long_run_reference, occupation_distances, KernelSpec, MarkovKernel};
use crate::measure::{find_exp_rate, Frequency, Law, Metric, Point, Sampler};
use crate::rate::{t1_from_gaussian_moment, RateFunction};
use crate::seed;
use crate::wasserstein::{quantize, w1, FnCdf, GaussianCdf, Reference, UniformCdf};
use crate::{Error, Result};

/// Largest reference sample used in place of a continuous law without a 1-D CDF.
pub const REFERENCE_CAP: usize = 2000;
/// Default chain length of the long run standing in for an unknown invariant law.
pub const LONG_RUN_STEPS: usize = 1_000_000;
/// Largest support of the compressed long-run reference.
pub const LONG_RUN_ATOMS: usize = 10_000;

const STREAM_REFERENCE: u64 = 0xef_e7e7;
const MOMENT_BUDGET: usize = 20_000;

/// Bound compared against the empirical frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum BoundSpec {
    /// `2e^{−2nt²}` for laws on `[0, 1]`.
    Dkw,
    /// `T₁(C)` bound with the ℝ^d covering constant. `a` defaults to the rate with
    /// `E e^{a|X|} = 2`; `C` defaults to `t1_from_gaussian_moment(a2, e_a2)`, the
    /// moment `e_a2 = E e^{a2|X|²}` being estimated when absent.
    T1Rd {
        #[serde(default)]
        a: Option<f64>,
        #[serde(default)]
        c: Option<f64>,
        #[serde(default)]
        a2: Option<f64>,
        #[serde(default)]
        e_a2: Option<f64>,
        #[serde(default)]
        constants: Option<RdConstants>,
    },
    /// `T₁(C)` bound with an explicit `log 𝒞_t`.
    T1 { c: f64, log_ct: f64 },
    /// Finite-support variant with a `k`-point quantization of a finite law as witness.
    Variant { c: f64, k: usize },
    /// `exp(−n(t − m)²/C)` with `m = 2W₁(μ, μ^k) + D√(k/n)`, for finite laws.
    QuantizedMeanConcentration { c: f64, k: usize },
    /// Occupation-measure bound; unset constants come from the kernel.
    Markov {
        #[serde(default)]
        c: Option<f64>,
        #[serde(default)]
        r: Option<f64>,
        #[serde(default)]
        m1: Option<f64>,
        #[serde(default)]
        c_d: Option<f64>,
    },
}

/// One experiment: a law (i.i.d.) or a kernel (Markov), a bound and the grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<Law>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
    /// Chain start and moment base point; the origin when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    pub bound: BoundSpec,
    pub n_grid: Vec<usize>,
    pub t_grid: Vec<f64>,
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_seed() -> u64 {
    seed::DEFAULT_SEED
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.law, &self.kernel) {
            (Some(law), None) => law.validate()?,
            (None, Some(k)) => k.validate()?,
            _ => return Err(Error::config("law", "exactly one of `law` and `kernel` must be given")),
        }
        if self.n_grid.is_empty() || self.n_grid.contains(&0) {
            return Err(Error::config("n_grid", "need a nonempty grid of positive sample sizes"));
        }
        if self.t_grid.is_empty() || self.t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::config("t_grid", "need a nonempty grid of finite t >= 0"));
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "must be >= 1"));
        }
        if let Some(x0) = &self.x0 {
            Point::new(x0.clone()).map_err(|e| Error::config("x0", e.to_string()))?;
            if x0.len() != self.dim() {
                return Err(Error::config("x0", format!("has {} coordinates, expected {}", x0.len(), self.dim())));
            }
        }
        match (&self.bound, &self.kernel) {
            (BoundSpec::Markov { .. }, None) => return Err(Error::config("bound", "markov bound needs a kernel")),
            (BoundSpec::Markov { .. }, Some(_)) => {}
            (_, Some(_)) => return Err(Error::config("bound", "kernel experiments use the markov bound")),
            _ => {}
        }
        if let (BoundSpec::Variant { k, .. } | BoundSpec::QuantizedMeanConcentration { k, .. }, Some(law)) = (&self.bound, &self.law) {
            if law.as_finite().is_none() {
                return Err(Error::config("bound", "quantization bounds need a finite law"));
            }
            if *k == 0 {
                return Err(Error::config("bound.k", "must be >= 1"));
            }
        }
        Ok(())
    }

    /// State-space dimension.
    pub fn dim(&self) -> usize {
        match (&self.law, &self.kernel) {
            (Some(law), _) => law.dim(),
            _ => self.x0.as_ref().map_or(1, |x| x.len()),
        }
    }

    pub fn origin(&self) -> Point {
        self.x0.clone().map_or_else(|| Point::origin(self.dim()), Point::raw)
    }

    pub fn metric(&self) -> Metric {
        self.law.as_ref().map_or(Metric::Euclidean, Law::natural_metric)
    }
}

/// Outcome of one `(n, t)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The bound exceeds the empirical frequency up to 3 standard errors.
    Dominates,
    /// The bound is at least 1, or does not apply.
    Vacuous,
    /// `freq − 3·stderr > bound`.
    Violation,
}

impl Verdict {
    pub fn judge(freq: f64, stderr: f64, log_bound: f64) -> Self {
        if !(log_bound < 0.0) {
            Verdict::Vacuous
        } else if freq - 3.0 * stderr > log_bound.exp() {
            Verdict::Violation
        } else {
            Verdict::Dominates
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Dominates => "dominates",
            Verdict::Vacuous => "vacuous",
            Verdict::Violation => "violation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: usize,
    #[serde(with = "json_float")]
    pub t: f64,
    pub empirical_freq: f64,
    pub stderr: f64,
    #[serde(with = "json_float")]
    pub bound_log_value: f64,
    pub verdict: Verdict,
    /// Reference discretization error added to `t` before thresholding.
    #[serde(default)]
    pub t_correction: f64,
    /// Why the bound was not evaluated, when it was not.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Saved form of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResults {
    pub config: ExperimentConfig,
    pub rows: Vec<ComparisonRow>,
}

impl ExperimentResults {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.verdict == Verdict::Violation).count()
    }
}

/// `W₁(L_n, reference)` over `trials` independent samples; trial `k` draws from `s.split(k)`.
pub fn iid_distances(s: &Sampler, reference: &Reference, metric: &Metric, n: usize, trials: usize) -> Result<Vec<f64>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|k| reference.distance(&s.split(k).sample_empirical(n)?, metric))
        .collect()
}

/// Frequency of `W₁(L_n, reference) ≥ t` over `trials` independent samples of size `n`.
pub fn iid_deviation_mc(s: &Sampler, reference: &Reference, n: usize, t: f64, trials: usize, seed: u64) -> Result<Frequency> {
    if trials == 0 {
        return Err(Error::DomainError("trials must be >= 1".into()));
    }
    let s = Sampler::new(s.law.clone(), seed);
    let d = iid_distances(&s, reference, &s.law.natural_metric(), n, trials)?;
    Ok(Frequency::exceeding(&d, t))
}

/// Reference for an i.i.d. experiment and the discretization error to add to `t`.
///
/// Finite laws and 1-D laws with a known CDF are used as is. Other laws are
/// replaced by `min(100·n_max, REFERENCE_CAP)` draws, and the distance between
/// two independent halves of such a sample is the correction.
pub fn iid_reference(law: &Law, n_max: usize, seed: u64) -> Result<(Reference, f64)> {
    if let Some(m) = law.as_finite() {
        return Ok((Reference::Discrete(m), 0.0));
    }
    match law {
        Law::Gaussian { mean, var } if mean.len() == 1 => {
            return Ok((Reference::analytic(GaussianCdf { mean: mean[0], sd: var[0].sqrt() }), 0.0));
        }
        Law::UniformCube { d: 1 } => return Ok((Reference::analytic(UniformCdf::unit()), 0.0)),
        Law::ExponentialTail { rate } => {
            let rate = *rate;
            let cdf = FnCdf::new(move |x| -(-rate * x).exp_m1(), 0.0, 60.0 / rate);
            return Ok((Reference::analytic(cdf), 0.0));
        }
        _ => {}
    }
    let m = (100 * n_max).clamp(2, REFERENCE_CAP);
    let s = Sampler::new(law.clone(), seed::derive(seed, STREAM_REFERENCE, 0));
    let metric = law.natural_metric();
    let reference = s.sample_empirical(m)?;
    let a = s.split(1).sample_empirical(m / 2)?;
    let b = s.split(2).sample_empirical(m / 2)?;
    let correction = w1(&a, &b, &metric)?;
    Ok((Reference::Discrete(reference), correction))
}

enum PreparedBound {
    Dkw,
    T1Rd { a: f64, c: f64, d: usize, constants: RdConstants },
    T1 { c: f64, log_ct: f64 },
    Variant { c: f64, witness: Witness },
    Quantized { c: f64, k: usize, w: f64, diameter: f64 },
    Markov { c: f64, r: f64, m1: f64, d: usize, c_d: f64 },
}

impl PreparedBound {
    fn eval(&self, n: usize, t: f64) -> Result<BoundReport> {
        match self {
            PreparedBound::Dkw => {
                let mut r = bound_t1(0.25, LN_2, t, n);
                r.name = "dkw".into();
                r.intermediates.clear();
                Ok(r)
            }
            PreparedBound::T1Rd { a, c, d, constants } => bound_rd(*a, *c, *d, t, n, constants),
            PreparedBound::T1 { c, log_ct } => Ok(bound_t1(*c, *log_ct, t, n)),
            PreparedBound::Variant { c, witness } => bound_variant(*c, witness, t, n),
            PreparedBound::Quantized { c, k, w, diameter } => {
                let m = mean_bound_quantized(*w, *k, *diameter, n);
                Ok(concentration_around_mean(&RateFunction::quadratic(*c), m, t, n))
            }
            PreparedBound::Markov { c, r, m1, d, c_d } => bound_markov_with(*c, *r, *m1, *d, t, n, *c_d),
        }
    }
}

fn prepare_bound(cfg: &ExperimentConfig, long_run_m1: Option<f64>) -> Result<PreparedBound> {
    let x0 = cfg.origin();
    let metric = cfg.metric();
    Ok(match &cfg.bound {
        BoundSpec::Dkw => PreparedBound::Dkw,
        BoundSpec::T1 { c, log_ct } => PreparedBound::T1 { c: *c, log_ct: *log_ct },
        BoundSpec::T1Rd { a, c, a2, e_a2, constants } => {
            let law = cfg.law.as_ref().expect("validated");
            let sampler = Sampler::new(law.clone(), seed::derive(cfg.seed, STREAM_REFERENCE, 1));
            let a = match a {
                Some(a) => *a,
                None => find_exp_rate(&sampler, &x0, &metric, 2.0)?,
            };
            let c = match (c, a2) {
                (Some(c), _) => *c,
                (None, Some(a2)) => {
                    let e = match e_a2 {
                        Some(e) => *e,
                        None => {
                            sampler
                                .split(3)
                                .expectation(
                                    |p| {
                                        let d = metric.distance(p, &x0);
                                        (a2 * d * d).exp()
                                    },
                                    MOMENT_BUDGET,
                                )
                                .mean
                        }
                    };
                    t1_from_gaussian_moment(*a2, e)
                }
                (None, None) => return Err(Error::config("bound.c", "give `c` or `a2`")),
            };
            let d = cfg.dim();
            PreparedBound::T1Rd {
                a,
                c,
                d,
                constants: constants.unwrap_or_else(|| RdConstants::default_for(d)),
            }
        }
        BoundSpec::Variant { c, k } => {
            let mu = cfg.law.as_ref().and_then(Law::as_finite).expect("validated");
            let q = quantize(&mu, *k, &metric)?;
            PreparedBound::Variant {
                c: *c,
                witness: Witness {
                    k: q.measure.len(),
                    diameter: q.measure.diameter(&metric),
                    achieved_w1: q.achieved,
                },
            }
        }
        BoundSpec::QuantizedMeanConcentration { c, k } => {
            let mu = cfg.law.as_ref().and_then(Law::as_finite).expect("validated");
            let q = quantize(&mu, *k, &metric)?;
            PreparedBound::Quantized {
                c: *c,
                k: q.measure.len(),
                w: q.achieved,
                diameter: q.measure.diameter(&metric),
            }
        }
        BoundSpec::Markov { c, r, m1, c_d } => {
            let k = cfg.kernel.as_ref().expect("validated");
            let c = c.or(k.declared_c()).ok_or_else(|| Error::config("bound.c", "kernel declares no T1 constant"))?;
            let r = r.or(k.declared_r()).ok_or_else(|| Error::config("bound.r", "kernel declares no contraction coefficient"))?;
            let m1 = match (m1, k) {
                (Some(m), _) => *m,
                (None, KernelSpec::Ar1 { r, noise_sigma }) => ar1_m1(*r, *noise_sigma)?,
                (None, _) => long_run_m1.ok_or_else(|| Error::config("bound.m1", "no estimate of m1"))?,
            };
            let d = cfg.dim();
            PreparedBound::Markov {
                c,
                r,
                m1,
                d,
                c_d: c_d.unwrap_or_else(|| default_markov_c_d(d)),
            }
        }
    })
}

fn cell_rows(n: usize, distances: &[f64], cfg: &ExperimentConfig, bound: &PreparedBound, correction: f64) -> Vec<ComparisonRow> {
    cfg.t_grid
        .iter()
        .map(|&t| {
            let f = Frequency::exceeding(distances, t + correction);
            let (log_bound, note) = match bound.eval(n, t) {
                Ok(rep) => (rep.log_value, None),
                Err(e) => (0.0, Some(e.to_string())),
            };
            ComparisonRow {
                n,
                t,
                empirical_freq: f.freq,
                stderr: f.stderr,
                bound_log_value: log_bound,
                verdict: if note.is_some() { Verdict::Vacuous } else { Verdict::judge(f.freq, f.stderr, log_bound) },
                t_correction: correction,
                note,
            }
        })
        .collect()
}

/// Runs every `(n, t)` cell of the grid; rows are sorted by `(n, t)`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ComparisonRow>> {
    cfg.validate()?;
    let n_max = *cfg.n_grid.iter().max().expect("validated");
    let x0 = cfg.origin();
    let metric = cfg.metric();
    let mut rows = Vec::new();
    if let Some(law) = &cfg.law {
        let (reference, correction) = iid_reference(law, n_max, cfg.seed)?;
        let bound = prepare_bound(cfg, None)?;
        for (ci, &n) in cfg.n_grid.iter().enumerate() {
            let s = Sampler::new(law.clone(), seed::derive(cfg.seed, ci as u64, 0));
            let d = iid_distances(&s, &reference, &metric, n, cfg.trials)?;
            rows.extend(cell_rows(n, &d, cfg, &bound, correction));
        }
    } else {
        let k = cfg.kernel.as_ref().expect("validated");
        let (reference, correction, m1) = match k {
            KernelSpec::Ar1 { r, noise_sigma } => (Reference::analytic(ar1_stationary(*r, *noise_sigma)?), 0.0, None),
            _ => {
                let lr = long_run_reference(k, &x0, LONG_RUN_STEPS, LONG_RUN_ATOMS, seed::derive(cfg.seed, STREAM_REFERENCE, 2))?;
                let m1 = lr.measure.integrate(|p| metric.distance(p, &x0));
                (Reference::Discrete(lr.measure), lr.error, Some(m1))
            }
        };
        let bound = prepare_bound(cfg, m1)?;
        for (ci, &n) in cfg.n_grid.iter().enumerate() {
            let d = occupation_distances(k, &reference, &x0, n, cfg.trials, seed::derive(cfg.seed, ci as u64, 0))?;
            rows.extend(cell_rows(n, &d, cfg, &bound, correction));
        }
    }
    sort_rows(&mut rows);
    Ok(rows)
}

fn sort_rows(rows: &mut [ComparisonRow]) {
    rows.sort_by(|a, b| a.n.cmp(&b.n).then(a.t.total_cmp(&b.t)));
}

/// Rendered comparison tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tables {
    /// Aligned, human-readable table.
    pub text: String,
    /// Columns `n,t,freq,stderr,log_bound,verdict`.
    pub csv: String,
}

fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v}")
    }
}

/// Renders rows sorted by `(n, t)`; the CSV depends only on the row values.
pub fn report_tables(rows: &[ComparisonRow]) -> Result<Tables> {
    if rows.is_empty() {
        return Err(Error::DomainError("no rows to report".into()));
    }
    let mut rows = rows.to_vec();
    sort_rows(&mut rows);
    let mut csv = String::from("n,t,freq,stderr,log_bound,verdict\n");
    let mut text = format!("{:>8} {:>10} {:>10} {:>10} {:>14} {:>10}  {}\n", "n", "t", "freq", "stderr", "log_bound", "bound", "verdict");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.n,
            fmt_float(r.t),
            fmt_float(r.empirical_freq),
            fmt_float(r.stderr),
            fmt_float(r.bound_log_value),
            r.verdict.as_str()
        );
        let _ = writeln!(
            text,
            "{:>8} {:>10.4} {:>10.5} {:>10.5} {:>14.4e} {:>10.3e}  {}",
            r.n,
            r.t,
            r.empirical_freq,
            r.stderr,
            r.bound_log_value,
            r.bound_log_value.min(0.0).exp(),
            r.verdict.as_str()
        );
    }
    Ok(Tables { text, csv })
}

/// Writes `results` as JSON to `path` and the CSV table next to it with extension `csv`.
pub fn write_results(results: &ExperimentResults, path: &Path) -> Result<PathBuf> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, serde_json::to_string_pretty(results)?)?;
    let csv_path = path.with_extension("csv");
    std::fs::write(&csv_path, report_tables(&results.rows)?.csv)?;
    Ok(csv_path)
}

pub fn read_results(path: &Path) -> Result<ExperimentResults> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

/// Small uniform experiment against the DKW bound.
pub fn default_config() -> ExperimentConfig {
    ExperimentConfig {
        law: Some(Law::UniformCube { d: 1 }),
        kernel: None,
        x0: None,
        bound: BoundSpec::Dkw,
        n_grid: vec![50, 200],
        t_grid: vec![0.05, 0.1, 0.2],
        trials: 2000,
        seed: seed::DEFAULT_SEED,
        output: None,
    }
}
