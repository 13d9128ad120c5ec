//! Small numerical kernels shared by the other modules.

use statrs::function::erf::{erf, erfc};

/// Golden-section iterations used by the conjugate and Γ optimizers.
pub const GOLDEN_ITERATIONS: usize = 200;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Maximizes a unimodal `f` on `[lo, hi]`; returns `(argmax, max)`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iterations: usize) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iterations {
        if hi - lo <= f64::EPSILON * (lo.abs() + hi.abs()) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    // endpoints matter when the maximum sits on the boundary
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for x in [lo, hi] {
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Minimizes a unimodal `f` on `[lo, hi]`; returns `(argmin, min)`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, iterations: usize) -> (f64, f64) {
    let (x, v) = golden_max(|x| -f(x), lo, hi, iterations);
    (x, -v)
}

/// Root of a continuous `f` with `f(lo) <= 0 <= f(hi)` (or the reverse) by bisection.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iterations: usize) -> f64 {
    let flo = f(lo);
    let increasing = flo <= 0.0;
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if (fm <= 0.0) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal cdf Φ.
pub fn normal_cdf(z: f64) -> f64 {
    if z < -1.0 {
        0.5 * erfc(-z / std::f64::consts::SQRT_2)
    } else {
        0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
    }
}

/// Standard normal upper tail 1 − Φ.
pub fn normal_sf(z: f64) -> f64 {
    normal_cdf(-z)
}

/// Standard normal quantile Φ⁻¹.
pub fn normal_quantile(p: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::standard().inverse_cdf(p)
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}
