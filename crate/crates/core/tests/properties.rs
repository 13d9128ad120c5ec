//! Property tests for the invariants of each module.

use proptest::prelude::*;

use w1conc::bounds::{bound_modified, bound_rd, bound_t1, bound_variant, RdConstants, Witness};
use w1conc::covering::{enumerate_tree_net, greedy_cover, log_n_euclidean_ball, n_holder_ball, n_lipschitz_crude, n_lipschitz_tree, FiniteMetricSpace};
use w1conc::markov::{ar1_m1, bound_markov, estimate_contraction, KernelSpec};
use w1conc::measure::{find_exp_rate, holder_norm, DiscreteMeasure, Law, Metric, Point, Sampler};
use w1conc::rate::{conjugate, gamma, rate_markov_transform, sigma_inverse, RateFunction};
use w1conc::wasserstein::{dual_gap, keep_in_place_coupling, quantize, w1, w1_1d, w1_exact, DualCertificate};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn weights(raw: Vec<f64>) -> Vec<f64> {
    let s: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|x| x / s).collect();
    let head: f64 = w[..w.len() - 1].iter().sum();
    *w.last_mut().unwrap() = 1.0 - head;
    w
}

fn measure(d: usize, max: usize) -> impl Strategy<Value = DiscreteMeasure> {
    (1..=max).prop_flat_map(move |m| {
        (prop::collection::vec(prop::collection::vec(-5.0f64..5.0, d), m), prop::collection::vec(0.05f64..1.0, m))
            .prop_map(|(pts, w)| DiscreteMeasure::from_weighted_points(pts.into_iter().map(|p| Point::new(p).unwrap()).collect(), weights(w)).unwrap())
    })
}

fn metric() -> impl Strategy<Value = Metric> {
    prop_oneof![Just(Metric::Euclidean), Just(Metric::SupNormPath), (0.05f64..1.0).prop_map(|alpha| Metric::HolderSeminorm { alpha })]
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn metrics_are_symmetric_and_triangular(
        m in metric(),
        x in prop::collection::vec(-3.0f64..3.0, 6),
        y in prop::collection::vec(-3.0f64..3.0, 6),
        z in prop::collection::vec(-3.0f64..3.0, 6),
    ) {
        let (x, y, z) = (Point::new(x).unwrap(), Point::new(y).unwrap(), Point::new(z).unwrap());
        prop_assert!((m.distance(&x, &y) - m.distance(&y, &x)).abs() < 1e-12);
        prop_assert!(m.distance(&x, &z) <= m.distance(&x, &y) + m.distance(&y, &z) + 1e-9);
    }

    #[test]
    fn empirical_weights_are_multiples_of_one_over_n(n in 1usize..200, seed in any::<u64>()) {
        let law = Law::Finite { measure: DiscreteMeasure::from_1d(&[0.0, 1.0, 2.0], &[0.2, 0.3, 0.5]).unwrap() };
        let m = Sampler::new(law, seed).sample_empirical(n).unwrap();
        for &w in m.weights() {
            let k = w * n as f64;
            prop_assert!((k - k.round()).abs() < 1e-9);
        }
    }

    #[test]
    fn holder_norm_nondecreasing_in_alpha(path in prop::collection::vec(-2.0f64..2.0, 2..40), a in 0.05f64..0.95, b in 0.05f64..0.95) {
        // lags are at most 1, so |t − s|^{−α} grows with α
        let p = Point::new(path).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(holder_norm(&p, lo).unwrap() <= holder_norm(&p, hi).unwrap() + 1e-12);
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn w1_exact_is_a_metric(a in measure(2, 20), b in measure(2, 20), c in measure(2, 20)) {
        let m = Metric::Euclidean;
        let ab = w1_exact(&a, &b, &m).unwrap().0;
        let ba = w1_exact(&b, &a, &m).unwrap().0;
        let bc = w1_exact(&b, &c, &m).unwrap().0;
        let ac = w1_exact(&a, &c, &m).unwrap().0;
        prop_assert!((ab - ba).abs() < 1e-8);
        prop_assert!(ac <= ab + bc + 1e-8);
        prop_assert!(w1_exact(&a, &a, &m).unwrap().0.abs() < 1e-8);
    }

    #[test]
    fn w1_1d_matches_flow(a in measure(1, 50), b in measure(1, 50)) {
        let e = w1_exact(&a, &b, &Metric::Euclidean).unwrap().0;
        prop_assert!((w1_1d(&a, &b).unwrap() - e).abs() < 1e-9);
    }

    #[test]
    fn keep_in_place_dominates_exact(
        pts in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 2), 2..12),
        raw in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 12),
    ) {
        let m = pts.len();
        let pts: Vec<Point> = pts.into_iter().map(|p| Point::new(p).unwrap()).collect();
        prop_assume!(DiscreteMeasure::new(pts.clone(), weights(vec![1.0; m])).is_ok());
        let wa = weights(raw[..m].iter().map(|r| r.0 + 0.01).collect());
        let wb = weights(raw[..m].iter().map(|r| r.1 + 0.01).collect());
        let mu = DiscreteMeasure::new(pts.clone(), wa).unwrap();
        let nu = DiscreteMeasure::new(pts, wb).unwrap();
        let (_, bound) = keep_in_place_coupling(&mu, &nu, &Metric::Euclidean).unwrap();
        prop_assert!(bound >= w1_exact(&mu, &nu, &Metric::Euclidean).unwrap().0 - 1e-10);
    }

    #[test]
    fn weak_duality(a in measure(2, 12), b in measure(2, 12), z in prop::collection::vec(-5.0f64..5.0, 2), lam in -1.0f64..1.0, kind in 0usize..2) {
        let z = Point::new(z).unwrap();
        let m = Metric::Euclidean;
        let anchors: Vec<Point> = a.support().iter().take(3).cloned().collect();
        let f = DualCertificate::from_fn(&a, &b, |p| match kind {
            0 => lam * m.distance(p, &z),
            _ => anchors.iter().map(|y| m.distance(p, y)).fold(f64::INFINITY, f64::min),
        });
        prop_assert!(dual_gap(&a, &b, &m, &f).unwrap() >= -1e-9);
    }

    #[test]
    fn quantize_nonincreasing_in_k(a in measure(2, 15)) {
        let mut prev = f64::INFINITY;
        for k in 1..=a.len() {
            let q = quantize(&a, k, &Metric::Euclidean).unwrap();
            prop_assert!(q.achieved <= prev + 1e-12);
            prev = q.achieved;
        }
        prop_assert!(prev.abs() < 1e-12);
    }
}

fn rate() -> impl Strategy<Value = RateFunction> {
    prop_oneof![
        (0.1f64..5.0).prop_map(RateFunction::quadratic),
        (0.1f64..5.0).prop_map(RateFunction::modified_bv),
        (0.1f64..3.0, 0.2f64..2.0, 0.1f64..2.0).prop_map(|(c, outer, scale)| RateFunction::quadratic(c).transformed(outer, scale)),
        prop::collection::vec(0.1f64..3.0, 1..5).prop_map(|mut slopes| {
            slopes.sort_by(f64::total_cmp);
            let mut table = vec![(0.0, 0.0)];
            for (i, s) in slopes.iter().enumerate() {
                let (x, y) = table[i];
                table.push((x + 0.5, y + 0.5 * s));
            }
            RateFunction::custom(table).unwrap()
        }),
    ]
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn conjugate_convex_and_zero_at_zero(alpha in rate(), s1 in 0.0f64..0.1, s2 in 0.0f64..0.1) {
        prop_assert!(conjugate(&alpha, 0.0).unwrap().value.abs() < 1e-9);
        let (c1, c2, cm) = (conjugate(&alpha, s1), conjugate(&alpha, s2), conjugate(&alpha, 0.5 * (s1 + s2)));
        if let (Ok(c1), Ok(c2), Ok(cm)) = (c1, c2, cm) {
            prop_assert!(cm.value <= 0.5 * (c1.value + c2.value) + 1e-9 * (1.0 + c1.value.abs() + c2.value.abs()));
        }
    }

    #[test]
    fn gamma_monotone(c in 0.1f64..5.0, l in 0.01f64..100.0, n in 1usize..100_000) {
        let q = RateFunction::quadratic(c);
        let g = gamma(&q, l, n).unwrap();
        prop_assert!(gamma(&q, l, 2 * n).unwrap() <= g + 1e-12);
        prop_assert!(gamma(&q, 2.0 * l, n).unwrap() >= g - 1e-12);
    }

    #[test]
    fn markov_transform_identity_at_r0_n1(alpha in rate(), t in 0.0f64..5.0) {
        let (path, marginal) = rate_markov_transform(&alpha, 0.0, 1).unwrap();
        prop_assert!((path.eval(t) - alpha.eval(t)).abs() <= 1e-12 * (1.0 + alpha.eval(t)));
        prop_assert!((marginal.eval(t) - alpha.eval(t)).abs() <= 1e-12 * (1.0 + alpha.eval(t)));
    }

    #[test]
    fn sigma_inverse_roundtrip(x in 1.0f64..1000.0) {
        let y = x * x.ln() - x + 1.0;
        prop_assert!((sigma_inverse(y) - x).abs() <= 1e-9 * x);
    }
}

/// Smallest number of points whose closed `r`-balls cover the space.
fn exact_cover(space: &FiniteMetricSpace, r: f64) -> usize {
    let n = space.len();
    (1..=n)
        .find(|&k| {
            (0u32..1 << n).filter(|s| s.count_ones() as usize == k).any(|s| (0..n).all(|i| (0..n).any(|c| s >> c & 1 == 1 && space.d(i, c) <= r)))
        })
        .unwrap()
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn greedy_cover_within_packing_factor(xs in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), 1..10), delta in 0.05f64..0.6) {
        let space = FiniteMetricSpace::new(xs.into_iter().map(|p| Point::new(p).unwrap()).collect(), Metric::Euclidean, 0).unwrap();
        let g = greedy_cover(&space, delta).unwrap();
        prop_assert!(g.covers(&space));
        prop_assert!(g.count <= exact_cover(&space, delta / 2.0));
    }

    #[test]
    fn tree_net_size_within_cap(steps in prop::collection::vec(0.0f64..1.0, 1..25), eps in 0.05f64..0.3) {
        let mut xs = vec![0.0];
        for s in steps {
            xs.push(xs.last().unwrap() + s * eps);
        }
        let space = FiniteMetricSpace::on_line(&xs).unwrap();
        let net = enumerate_tree_net(&space, eps).unwrap();
        prop_assert!(net.count() as f64 <= net.size_cap());
    }

    #[test]
    fn log_formulas_monotone_in_ratio(r in 0.1f64..10.0, delta in 0.01f64..1.0, d in 1usize..4, alpha in 0.1f64..1.0) {
        prop_assert!(log_n_euclidean_ball(2.0 * r, delta, d) >= log_n_euclidean_ball(r, delta, d));
        prop_assert!(log_n_euclidean_ball(r, delta / 2.0, d) >= log_n_euclidean_ball(r, delta, d));
        prop_assert!(n_holder_ball(2.0 * r, delta, alpha).unwrap() >= n_holder_ball(r, delta, alpha).unwrap());
        let nk = log_n_euclidean_ball(r, delta, d).exp();
        prop_assert!(n_lipschitz_crude(nk, 2.0 * r, delta) >= n_lipschitz_crude(nk, r, delta));
        prop_assert!(n_lipschitz_tree(nk, 2.0 * r, delta) >= n_lipschitz_tree(nk, r, delta));
    }
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn bounds_monotone_in_n_and_t(n in 1usize..100_000, t in 0.05f64..0.4, c in 0.5f64..4.0, logc in 0.0f64..50.0) {
        let pairs = [
            (bound_t1(c, logc, t, n).log_value, bound_t1(c, logc, t, 2 * n).log_value, bound_t1(c, logc, 1.5 * t, n).log_value),
            (bound_modified(c, logc, t, n).log_value, bound_modified(c, logc, t, 2 * n).log_value, bound_modified(c, logc, 1.5 * t, n).log_value),
        ];
        // the modified bound's prefactor grows with n; monotonicity in n holds once n t² dominates
        prop_assert!(pairs[0].1 <= pairs[0].0 + 1e-9);
        prop_assert!(pairs[0].2 <= pairs[0].0 + 1e-9);
        prop_assert!(pairs[1].2 <= pairs[1].0 + 1e-9);
        let k = RdConstants::default_for(1);
        let rd = bound_rd(1.0, c, 1, t, n, &k).unwrap();
        prop_assert!(bound_rd(1.0, c, 1, t, 2 * n, &k).unwrap().log_value <= rd.log_value + 1e-9);
        prop_assert!(bound_rd(1.0, c, 1, 1.5 * t, n, &k).unwrap().log_value <= rd.log_value + 1e-9);
        let w = Witness { k: 3, diameter: 1.0, achieved_w1: 0.01 };
        let v = bound_variant(c, &w, t, n).unwrap().log_value;
        prop_assert!(bound_variant(c, &w, t, 2 * n).unwrap().log_value <= v + 1e-9);
        prop_assert!(bound_variant(c, &w, 1.5 * t, n).unwrap().log_value <= v + 1e-9);
    }

    #[test]
    fn markov_bound_monotone_and_continuous_in_r(n in 10usize..100_000, t in 0.5f64..3.0, r in 0.0f64..0.98) {
        let m1 = ar1_m1(0.5, 1.0).unwrap();
        let b = bound_markov(2.0, r, m1, 1, t, n).unwrap().log_value;
        prop_assert!(bound_markov(2.0, r, m1, 1, t, 2 * n).unwrap().log_value <= b + 1e-9);
        prop_assert!(bound_markov(2.0, (r + 0.01).min(0.999), m1, 1, t, n).unwrap().log_value >= b - 1e-9);
        let near = bound_markov(2.0, r + 1e-9, m1, 1, t, n).unwrap().log_value;
        prop_assert!((near - b).abs() <= 1e-5 * (1.0 + b.abs()));
    }
}

#[test]
fn asymptotic_rates_converge() {
    let c = 2.0;
    let t = 1.5;
    let (mut prev_t1, mut prev_m) = (f64::INFINITY, f64::INFINITY);
    for n in [1_000usize, 10_000, 100_000, 1_000_000] {
        let target = t * t / (8.0 * c);
        let e = (-bound_t1(c, 5.0, t, n).log_value / n as f64 / target - 1.0).abs();
        assert!(e <= prev_t1);
        prev_t1 = e;
        let r = 0.3;
        let b = bound_markov(c, r, 0.4, 1, t, n).unwrap();
        let em = (-b.log_value / n as f64 / ((1.0 - r).powi(2) * target) - 1.0).abs();
        assert!(em <= prev_m);
        prev_m = em;
    }
    assert!(prev_t1 < 0.01 && prev_m < 0.01);
}

#[test]
fn markov_vacuous_region_grows_as_r_to_one() {
    let m1 = 0.5;
    let grid: Vec<f64> = (1..=60).map(|i| 0.1 * i as f64).collect();
    let useless = |r: f64| grid.iter().filter(|&&t| bound_markov(2.0, r, m1, 1, t, 1000).map_or(true, |b| b.probability() >= 0.5)).count();
    let counts: Vec<usize> = [0.0, 0.5, 0.9, 0.99].iter().map(|&r| useless(r)).collect();
    assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
    assert!(counts[0] < grid.len());
    assert_eq!(counts[3], grid.len());
    for &t in &grid {
        if let Ok(b) = bound_markov(2.0, 0.999, m1, 1, t, 1000) {
            assert!(b.probability() > 0.99);
        }
    }
}

#[test]
fn contraction_estimates_track_ar1_coefficient() {
    let pairs = vec![(Point::scalar(-1.0), Point::scalar(1.0)), (Point::scalar(0.5), Point::scalar(2.0))];
    for (i, r) in [0.0, 0.3, 0.6, 0.9].into_iter().enumerate() {
        let e = estimate_contraction(&KernelSpec::Ar1 { r, noise_sigma: 1.0 }, &pairs, 10_000, 40 + i as u64).unwrap();
        assert!((e.estimate - r).abs() <= 0.1, "r = {r}: {e:?}");
    }
}

#[test]
fn exp_rate_reestimate_within_target() {
    let metric = Metric::Euclidean;
    let x0 = Point::scalar(0.0);
    let s = Sampler::new(Law::standard_gaussian(1), 77);
    let a = find_exp_rate(&s, &x0, &metric, 2.0).unwrap();
    let check = Sampler::new(Law::standard_gaussian(1), 78).expectation(|p| (a * metric.distance(p, &x0)).exp(), 200_000);
    assert!(check.mean >= 1.0 && check.mean <= 2.0 + 3.0 * check.stderr, "{a} {check:?}");
}

#[test]
fn w1_dispatch_agrees_on_the_line() {
    let a = DiscreteMeasure::from_1d(&[0.0, 1.0, 3.0], &[0.2, 0.5, 0.3]).unwrap();
    let b = DiscreteMeasure::from_1d(&[0.5, 2.0], &[0.6, 0.4]).unwrap();
    let e = w1_exact(&a, &b, &Metric::Euclidean).unwrap().0;
    assert!((w1(&a, &b, &Metric::Euclidean).unwrap() - e).abs() < 1e-12);
}
