//! Oracles shared by the integration tests. Nothing here calls into the
//! crate's derivative or integration code paths.
#![allow(dead_code)]

use asn_core::Params;

/// Adaptive Simpson quadrature with Richardson correction.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64, whole: f64, m: f64, fm: f64, tol: f64, depth: u32) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1) + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
    }
    // Split into unit-ish panels first so narrow modes are not skipped.
    let panels = 200;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let (lo, hi) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            let (flo, fhi) = (f(lo), f(hi));
            let (m, fm, whole) = simpson(f, lo, flo, hi, fhi);
            recurse(f, lo, flo, hi, fhi, whole, m, fm, tol / panels as f64, 50)
        })
        .sum()
}

/// Central difference with one Richardson step, `O(h^4)`.
pub fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

pub fn params(mu: f64, sigma: f64, alpha: f64) -> Params {
    Params::new(mu, sigma, alpha).unwrap()
}

/// `alpha x sigma` panel, location 0.
pub fn panel() -> Vec<Params> {
    let mut v = Vec::new();
    for &alpha in &[-10.0, -5.0, -1.0, 0.0, 1.0, 5.0, 10.0] {
        for &sigma in &[0.1, 1.0, 10.0] {
            v.push(params(0.0, sigma, alpha));
        }
    }
    v
}

/// Plain ASN density written out independently of the crate.
pub fn asn_density(p: &Params, t: f64) -> f64 {
    let z = (t - p.mu()) / p.sigma();
    let a = p.alpha();
    ((1.0 - a * z).powi(2) + 1.0) / ((2.0 + a * a) * p.sigma()) * (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal CDF at z = -5, -4.75, ..., 5 (mpmath, 40 digits).
pub const NORMAL_CDF: [f64; 41] = [
    2.866515718791939e-07,
    1.0170832425687032e-06,
    3.3976731247300603e-06,
    1.068852577493442e-05,
    3.1671241833119924e-05,
    8.841728520080387e-05,
    0.00023262907903552504,
    0.000577025042390767,
    0.0013498980316300946,
    0.002979763235054557,
    0.006209665325776135,
    0.012224472655044703,
    0.02275013194817921,
    0.04005915686381709,
    0.06680720126885807,
    0.10564977366685525,
    0.15865525393145705,
    0.2266273523768682,
    0.3085375387259869,
    0.4012936743170763,
    0.5,
    0.5987063256829237,
    0.6914624612740131,
    0.7733726476231318,
    0.8413447460685429,
    0.8943502263331448,
    0.9331927987311419,
    0.9599408431361829,
    0.9772498680518208,
    0.9877755273449553,
    0.9937903346742238,
    0.9970202367649454,
    0.9986501019683699,
    0.9994229749576092,
    0.9997673709209645,
    0.9999115827147992,
    0.9999683287581669,
    0.9999893114742251,
    0.9999966023268753,
    0.9999989829167575,
    0.9999997133484281,
];

/// Exact standard normal quantiles of the rounded entries above.
pub const NORMAL_QUANTILE: [f64; 41] = [
    -5.0,
    -4.75,
    -4.5,
    -4.25,
    -4.0,
    -3.75,
    -3.5,
    -3.25,
    -3.0,
    -2.75,
    -2.5,
    -2.25,
    -2.0,
    -1.75,
    -1.5,
    -1.25,
    -1.0,
    -0.75,
    -0.5,
    -0.24999999999999994,
    0.0,
    0.24999999999999994,
    0.5,
    0.7500000000000001,
    0.9999999999999999,
    1.25,
    1.4999999999999998,
    1.7499999999999998,
    2.0,
    2.250000000000001,
    2.4999999999999987,
    2.75,
    2.999999999999998,
    3.2500000000000004,
    3.4999999999999827,
    3.7499999999999694,
    3.9999999999999996,
    4.250000000000626,
    4.499999999999459,
    4.750000000010472,
    4.999999999970175,
];
