//! # w1conc
//!
//! Non-asymptotic deviation bounds for empirical measures in the
//! 1-Wasserstein distance, together with the machinery needed to check them:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`measure`] | points, metrics, finite measures, seeded samplers, moment estimates |
//! | [`wasserstein`] | exact W₁ (min-cost flow and 1-D CDF formula), dual potentials, couplings, quantization |
//! | [`rate`] | deviation-rate functions α, monotone conjugates, Γ, transport constants |
//! | [`covering`] | covering-number formulas and constructive nets of Lipschitz functions |
//! | [`bounds`] | the deviation bounds themselves, reported with every intermediate constant |
//! | [`markov`] | kernels, chain simulation, contraction estimates, occupation-measure bounds |
//! | [`harness`] | experiment configs, Monte-Carlo deviation frequencies, comparison tables |
//!
//! Bound values are carried in the log domain throughout: the multiplicative
//! constants routinely overflow an `f64`.
//!
//! ```
//! use w1conc::measure::{DiscreteMeasure, Metric};
//! use w1conc::wasserstein::w1_exact;
//!
//! let mu = DiscreteMeasure::from_1d(&[0.0, 1.0], &[0.5, 0.5]).unwrap();
//! let nu = DiscreteMeasure::from_1d(&[0.5], &[1.0]).unwrap();
//! let (cost, _plan) = w1_exact(&mu, &nu, &Metric::Euclidean).unwrap();
//! assert!((cost - 0.5).abs() < 1e-9);
//! ```

pub mod bounds;
pub mod covering;
mod error;
pub mod harness;
pub mod markov;
pub mod measure;
pub mod numeric;
pub mod rate;
pub mod seed;
pub mod wasserstein;

pub use error::{Error, Result};
