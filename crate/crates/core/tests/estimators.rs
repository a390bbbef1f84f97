mod common;

use asn_core::estimators::{moment_matched_starts, neg_log_likelihood, score, spacings};
use asn_core::{fit, fit_from, initialize, Method, Params, Sample};
use common::{derivative, params};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

fn draws(p: &Params, n: usize, seed: u64) -> Sample {
    Sample::new(p.sample(n, &mut ChaCha8Rng::seed_from_u64(seed))).unwrap()
}

/// Central-difference gradient of `f` at `p` in `(mu, sigma, alpha)`.
fn fd_gradient(f: impl Fn(&Params) -> f64, p: &Params) -> [f64; 3] {
    let (mu, s, a) = (p.mu(), p.sigma(), p.alpha());
    [
        derivative(|x| f(&params(x, s, a)), mu, 1e-4 * s),
        derivative(|x| f(&params(mu, x, a)), s, 1e-4 * s),
        derivative(|x| f(&params(mu, s, x)), a, 1e-4),
    ]
}

fn close(got: [f64; 3], want: [f64; 3], tol: f64) -> bool {
    got.iter().zip(want).all(|(g, w)| (g - w).abs() <= tol * w.abs().max(1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn score_matches_finite_differences(
        n in 5usize..40, seed in 0u64..1000,
        mu in -2.0..2.0f64, sigma in 0.3..3.0f64, alpha in -6.0..6.0f64,
    ) {
        let sample = draws(&params(0.0, 1.0, 1.5), n, seed);
        let p = params(mu, sigma, alpha);
        let fd = fd_gradient(|q| -neg_log_likelihood(&sample, q), &p);
        let got = score(&sample, &p);
        prop_assert!(close(got, fd, 1e-6), "{got:?} vs {fd:?}");
    }

    #[test]
    fn residual_gradients_match_finite_differences(
        n in 5usize..40, seed in 0u64..1000,
        mu in -1.0..1.0f64, sigma in 0.5..2.0f64, alpha in -5.0..5.0f64,
    ) {
        let sample = draws(&params(0.0, 1.0, -2.0), n, seed);
        let p = params(mu, sigma, alpha);
        for m in [Method::Lsq, Method::Wlq, Method::Cme] {
            let fd = fd_gradient(|q| m.objective(&sample, q), &p);
            let got = m.gradient(&sample, &p);
            prop_assert!(close(got, fd, 1e-5), "{m}: {got:?} vs {fd:?}");
        }
    }

    #[test]
    fn spacings_sum_to_one(
        n in 1usize..60, seed in 0u64..1000,
        mu in -3.0..3.0f64, sigma in 0.2..5.0f64, alpha in -10.0..10.0f64,
    ) {
        let sample = draws(&params(0.0, 1.0, 3.0), n, seed);
        prop_assume!(!sample.has_ties());
        let d = spacings(&sample, &params(mu, sigma, alpha));
        prop_assert_eq!(d.len(), n + 1);
        prop_assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ade_is_permutation_invariant(seed in 0u64..1000) {
        let p = params(0.0, 1.0, 2.0);
        let mut raw = p.sample(15, &mut ChaCha8Rng::seed_from_u64(seed));
        let a = Method::Ade.objective(&Sample::new(raw.clone()).unwrap(), &p);
        raw.reverse();
        raw.rotate_left(4);
        prop_assert_eq!(a, Method::Ade.objective(&Sample::new(raw).unwrap(), &p));
    }
}

#[test]
fn spacing_criteria_gradients_match_finite_differences() {
    let sample = draws(&params(0.5, 0.5, 3.0), 30, 5);
    for p in [params(0.4, 0.6, 2.0), params(0.6, 0.45, 3.5), params(0.5, 0.5, -1.0)] {
        for m in [Method::Mps, Method::Ade, Method::Rade] {
            let fd = fd_gradient(|q| m.objective(&sample, q), &p);
            let got = m.gradient(&sample, &p);
            assert!(close(got, fd, 1e-5), "{m} at {p:?}: {got:?} vs {fd:?}");
        }
    }
}

#[test]
fn score_examples() {
    let s = Sample::new(vec![0.0]).unwrap();
    let g = score(&s, &params(0.0, 1.0, 0.0));
    assert!((g[0]).abs() < 1e-15 && (g[1] + 1.0).abs() < 1e-15 && g[2].abs() < 1e-15);
    let s = Sample::new(vec![1.0, -1.0]).unwrap();
    assert_eq!(score(&s, &params(0.0, 1.0, 0.0))[0], 0.0);
}

#[test]
fn likelihood_prefers_the_generating_skewness() {
    let sample = draws(&params(0.0, 1.0, 5.0), 1000, 21);
    assert!(neg_log_likelihood(&sample, &params(0.0, 1.0, 5.0)) <= neg_log_likelihood(&sample, &params(0.0, 1.0, 0.0)));
}

#[test]
fn score_vanishes_at_the_mle() {
    for seed in [1, 2, 3] {
        let sample = draws(&params(0.0, 1.0, 2.0), 200, seed);
        let result = fit(&sample, Method::Mle).unwrap();
        assert!(result.converged);
        let g = score(&sample, &result.params);
        assert!(g.iter().all(|v| v.abs() <= 1e-3), "seed {seed}: {g:?}");
    }
}

#[test]
fn initializer_examples() {
    let s = Sample::new(vec![-1.0, 0.0, 1.0, 2.0]).unwrap();
    let p = initialize(&s, Method::Lsq).unwrap();
    assert_eq!(p.mu(), 0.5);
    assert!((p.sigma() - 1.25f64.sqrt()).abs() < 1e-15);

    let normal = draws(&params(0.0, 1.0, 0.0), 1000, 8);
    let p = initialize(&normal, Method::Mle).unwrap();
    assert!(p.mu().abs() < 0.15 && (p.sigma() - 1.0).abs() < 0.15);

    assert!(initialize(&Sample::new(vec![2.0; 6]).unwrap(), Method::Ade).is_err());
}

#[test]
fn grid_argmin_finds_heavy_skew() {
    let sample = draws(&params(0.0, 1.0, 5.0), 1000, 9);
    // brute force over the 41 grid points as the oracle
    let (m, sd) = (sample.mean(), sample.population_sd());
    let oracle = (-20..=20)
        .map(|k| f64::from(k) * 0.5)
        .min_by(|&a, &b| {
            let fa = neg_log_likelihood(&sample, &params(m, sd, a));
            let fb = neg_log_likelihood(&sample, &params(m, sd, b));
            fa.partial_cmp(&fb).unwrap().then(a.abs().partial_cmp(&b.abs()).unwrap())
        })
        .unwrap();
    let starts = moment_matched_starts(&sample, Method::Mle, 1).unwrap();
    let alpha = starts[0].alpha();
    assert!((4.0..=6.0).contains(&alpha), "moment-matched {alpha}");
    assert_eq!(initialize(&sample, Method::Mle).unwrap().alpha(), oracle);
}

#[test]
fn ade_recovers_heavy_skew() {
    let truth = params(0.0, 1.0, 5.0);
    let r = fit(&draws(&truth, 5000, 17), Method::Ade).unwrap();
    assert!(r.converged);
    let p = r.params;
    assert!((p.mu() - 0.0).abs() < 0.1, "{p:?}");
    assert!((p.sigma() - 1.0).abs() < 0.1, "{p:?}");
    assert!((p.alpha() - 5.0).abs() < 1.0, "{p:?}");
}

#[test]
fn lsq_hits_exact_plotting_positions() {
    let n = 19;
    let z = Normal::new(0.0, 1.0).unwrap();
    let s = Sample::new((1..=n).map(|i| z.inverse_cdf(i as f64 / (n + 1) as f64)).collect()).unwrap();
    let r = fit(&s, Method::Lsq).unwrap();
    assert!(r.objective <= 1e-10, "{}", r.objective);
    assert!(r.params.alpha().abs() < 1e-3, "{:?}", r.params);
}

#[test]
fn fits_are_deterministic_and_self_consistent() {
    let sample = draws(&params(0.5, 0.5, 3.0), 60, 4);
    for m in Method::ALL {
        let a = fit(&sample, m).unwrap();
        let b = fit(&sample, m).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"), "{m}");
        assert!((m.objective(&sample, &a.params) - a.objective).abs() <= 1e-12, "{m}");
        if !matches!(m, Method::Mle | Method::Mps) {
            assert!(a.stderr.is_none(), "{m}");
        }
    }
}

#[test]
fn standard_errors_for_likelihood_type_methods() {
    let sample = draws(&params(0.0, 1.0, 2.0), 400, 6);
    for m in [Method::Mle, Method::Mps] {
        let se = fit(&sample, m).unwrap().stderr.expect("positive definite information");
        assert!(se.iter().all(|v| v.is_finite() && *v > 0.0), "{m}: {se:?}");
        // location error of order sigma / sqrt(n)
        assert!(se[0] < 0.5, "{m}: {se:?}");
    }
    assert!(fit(&sample, Method::Ade).unwrap().stderr.is_none());
}

#[test]
fn fit_from_truth_and_small_samples() {
    let truth = params(0.5, 0.5, 3.0);
    let sample = draws(&truth, 100, 14);
    let r = fit_from(&sample, Method::Mps, truth).unwrap();
    assert_eq!(r.init, truth);
    assert!(r.converged);
    assert!(fit(&Sample::new(vec![1.0, 2.0, 3.0]).unwrap(), Method::Mle).is_err());
}

#[test]
fn reflection_symmetry_of_weighted_least_squares() {
    let s = Sample::new(vec![-2.0, -0.7, 0.1, 0.4, 1.9]).unwrap();
    let r = Sample::new(s.values().iter().map(|v| -v).collect()).unwrap();
    let p = params(0.0, 1.0, 0.0);
    assert!((Method::Wlq.objective(&s, &p) - Method::Wlq.objective(&r, &p)).abs() < 1e-14);
}
