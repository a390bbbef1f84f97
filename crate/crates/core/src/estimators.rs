//! Seven estimators for `ASN(mu, sigma, alpha)` and the shared fit pipeline.
//!
//! Every method is expressed as an objective to minimize over an
//! [`OrderedSample`] (likelihood and spacing criteria are negated), then
//! handed to the simplex kernel in `(mu, ln sigma, alpha)` coordinates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distribution::AsnParams;
use crate::error::{Error, Result};
use crate::optimize::{invert_spd, numeric_hessian, NelderMead};
use crate::sample::OrderedSample;
use crate::scalar::Scalar;

/// Floor applied to CDF, survival and spacing values before taking logs.
pub const LOG_FLOOR: f64 = 1e-300;

/// Skewness grid used by [`initialize`]: -10, -9.5, ..., 10.
pub const ALPHA_GRID_HALF_STEPS: i32 = 20;

/// Estimation method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    /// Maximum likelihood.
    Mle,
    /// Ordinary least squares on plotting positions `i/(n+1)`.
    Lsq,
    /// Weighted least squares.
    Wlq,
    /// Maximum product of spacings.
    Mps,
    /// Cramér–von Mises minimum distance.
    Cme,
    /// Anderson–Darling minimum distance.
    Ade,
    /// Right-tail Anderson–Darling minimum distance.
    Rade,
}

impl Method {
    pub const ALL: [Method; 7] =
        [Method::Mle, Method::Lsq, Method::Wlq, Method::Mps, Method::Cme, Method::Ade, Method::Rade];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Mle => "MLE",
            Method::Lsq => "LSQ",
            Method::Wlq => "WLQ",
            Method::Mps => "MPS",
            Method::Cme => "CME",
            Method::Ade => "ADE",
            Method::Rade => "RADE",
        }
    }

    /// Objective value at `params`, with a flag set when any log argument hit
    /// [`LOG_FLOOR`].
    pub fn evaluate<T: Scalar>(self, sample: &OrderedSample<T>, params: &AsnParams<T>) -> Evaluation<T> {
        match self {
            Method::Mle => Evaluation::exact(neg_log_likelihood(sample, params)),
            Method::Lsq => Evaluation::exact(lsq_objective(sample, params)),
            Method::Wlq => Evaluation::exact(wlq_objective(sample, params)),
            Method::Mps => mps_evaluation(sample, params),
            Method::Cme => Evaluation::exact(cme_objective(sample, params)),
            Method::Ade => ade_evaluation(sample, params),
            Method::Rade => rade_evaluation(sample, params),
        }
    }

    pub fn objective<T: Scalar>(self, sample: &OrderedSample<T>, params: &AsnParams<T>) -> T {
        self.evaluate(sample, params).value
    }

    /// Analytic gradient of the objective in `(mu, sigma, alpha)`, assembled
    /// from the score or the CDF partials `delta1..delta3`.
    pub fn gradient<T: Scalar>(self, sample: &OrderedSample<T>, params: &AsnParams<T>) -> [T; 3] {
        match self {
            Method::Mle => score(sample, params).map(|g| -g),
            Method::Lsq => residual_gradient(sample, params, |i, n| plotting_i(i, n), |_, _| T::one()),
            Method::Wlq => residual_gradient(sample, params, |i, n| plotting_i(i, n), wlq_weight),
            Method::Cme => residual_gradient(sample, params, |i, n| plotting_mid(i, n), |_, _| T::one()),
            Method::Mps => mps_gradient(sample, params),
            Method::Ade => ade_gradient(sample, params),
            Method::Rade => rade_gradient(sample, params),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Domain(format!("unknown method '{s}' (expected one of MLE, LSQ, WLQ, MPS, CME, ADE, RADE)")))
    }
}

/// Objective value plus the log-floor diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation<T> {
    pub value: T,
    pub clamped: bool,
}

impl<T> Evaluation<T> {
    fn exact(value: T) -> Self {
        Self { value, clamped: false }
    }
}

#[inline]
fn floor_log<T: Scalar>(x: T, clamped: &mut bool) -> T {
    let floor = T::lit(LOG_FLOOR).max(T::min_positive_value());
    if x < floor {
        *clamped = true;
        floor.ln()
    } else {
        x.ln()
    }
}

/// `i / (n + 1)` for one-based `i`.
#[inline]
fn plotting_i<T: Scalar>(i: usize, n: usize) -> T {
    T::count(i) / T::count(n + 1)
}

/// `(2i - 1) / (2n)` for one-based `i`.
#[inline]
fn plotting_mid<T: Scalar>(i: usize, n: usize) -> T {
    T::count(2 * i - 1) / T::count(2 * n)
}

/// `(n+1)^2 (n+2) / (i (n - i + 1))`
#[inline]
fn wlq_weight<T: Scalar>(i: usize, n: usize) -> T {
    let n1 = T::count(n + 1);
    n1 * n1 * T::count(n + 2) / (T::count(i) * T::count(n - i + 1))
}

/// `-l(mu, sigma, alpha)`: negative log-likelihood.
pub fn neg_log_likelihood<T: Scalar>(sample: &OrderedSample<T>, params: &AsnParams<T>) -> T {
    -sample.values().iter().map(|&t| params.ln_pdf(t)).sum::<T>()
}

/// Gradient of the log-likelihood in `(mu, sigma, alpha)`.
///
/// With `u_i = 1 - alpha z_i` and `k_i = u_i^2 + 1`:
///
/// ```text
/// dl/dmu    = (1/sigma) [ sum 2 alpha u_i / k_i + sum z_i ]
/// dl/dsigma = (1/sigma) [ sum 2 alpha z_i u_i / k_i - n + sum z_i^2 ]
/// dl/dalpha = -sum 2 z_i u_i / k_i - 2 n alpha / (2 + alpha^2)
/// ```
pub fn score<T: Scalar>(sample: &OrderedSample<T>, params: &AsnParams<T>) -> [T; 3] {
    let (sigma, alpha) = (params.sigma(), params.alpha());
    let two = T::lit(2.0);
    let n = T::count(sample.len());
    let (mut s_mu, mut s_sigma, mut s_alpha) = (T::zero(), T::zero(), T::zero());
    for &t in sample.values() {
        let z = (t - params.mu()) / sigma;
        let u = T::one() - alpha * z;
        let ratio = two * u / (u * u + T::one());
        s_mu = s_mu + alpha * ratio + z;
        s_sigma = s_sigma + alpha * z * ratio + z * z;
        s_alpha = s_alpha - z * ratio;
    }
    [s_mu / sigma, (s_sigma - n) / sigma, s_alpha - two * n * alpha / (two + alpha * alpha)]
}

fn residual_sum<T: Scalar>(
    sample: &OrderedSample<T>,
    params: &AsnParams<T>,
    target: impl Fn(usize, usize) -> T,
    weight: impl Fn(usize, usize) -> T,
) -> T {
    let n = sample.len();
    sample
        .values()
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let r = params.cdf(t) - target(k + 1, n);
            weight(k + 1, n) * r * r
        })
        .sum()
}

fn residual_gradient<T: Scalar>(
    sample: &OrderedSample<T>,
    params: &AsnParams<T>,
    target: impl Fn(usize, usize) -> T,
    weight: impl Fn(usize, usize) -> T,
) -> [T; 3] {
    let n = sample.len();
    let mut g = [T::zero(); 3];
    for (k, &t) in sample.values().iter().enumerate() {
        let r = params.cdf(t) - target(k + 1, n);
        let c = T::lit(2.0) * weight(k + 1, n) * r;
        for (gj, dj) in g.iter_mut().zip(params.cdf_gradient(t)) {
            *gj = *gj + c * dj;
        }
    }
    g
}

/// `V = sum [F(t_(i)) - i/(n+1)]^2`
pub fn lsq_objective<T: Scalar>(sample: &OrderedSample<T>, params: &AsnParams<T>) -> T {
    residual_sum(sample, params, plotting_i, |_, _| T::one())
}

/// `W = sum (n+1)^2 (n+2) / (i (n-i+1)) [F(t_(i)) - i/(n+1)]^2`
pub fn wlq_objective<T: Scalar>(sample: &OrderedSample<T>, params: &AsnParams<T>) -> T {
    residual_sum(sample, params, plotting_i, wlq_weight)
}

/// `C = 1/(12n) + sum (F(t_(i)) - (2i-1)/(2n))^2`
pub fn cme_objective<T: Scalar>(sample: &OrderedSample<T>, params: &AsnParams<T>) -> T {
    let n = sample.len();
    (T::count(12 * n)).recip() + residual_sum(sample, params, plotting_mid, |_, _| T::one())
}

/// Spacing `D_i` for one-based `i` in `1..=n+1`. A zero-width spacing inside
/// a tie run is replaced by the density at the tied value.
fn spacing<T: Scalar>(values: &[T], i: usize, params: &AsnParams<T>) -> T {
    let n = values.len();
    if i == 1 {
        return params.cdf(values[0]);
    }
    if i == n + 1 {
        return params.survival(values[n - 1]);
    }
    let (prev, cur) = (values[i - 2], values[i - 1]);
    if prev == cur {
        return params.pdf(cur);
    }
    let f_prev = params.cdf(prev);
    if f_prev > T::lit(0.5) {
        params.survival(prev) - params.survival(cur)
    } else {
        params.cdf(cur) - f_prev
    }
}

/// All `n + 1` spacings, tie substitution included.
pub fn spacings<T: Scalar>(sample: &OrderedSample<T>, params: &AsnParams<T>) -> Vec<T> {
    let v = sample.values();
    (1..=v.len() + 1).map(|i| spacing(v, i, params)).collect()
}

fn mps_evaluation<T: Scalar>(sample: &OrderedSample<T>, params: &AsnParams<T>) -> Evaluation<T> {
    let v = sample.values();
    let mut clamped = false;
    let total: T = (1..=v.len() + 1).map(|i| floor_log(spacing(v, i, params), &mut clamped)).sum();
    Evaluation { value: -total / T::count(v.len() + 1), clamped }
}

/// `-H = -(1/(n+1)) sum log D_i`
pub fn mps_objective<T: Scalar>(sample: &OrderedSample<T>, params: &AsnParams<T>) -> T {
    mps_evaluation(sample, params).value
}

fn mps_gradient<T: Scalar>(sample: &OrderedSample<T>, params: &AsnParams<T>) -> [T; 3] {
    let v = sample.values();
    let n = v.len();
    let zero = [T::zero(); 3];
    let mut g = zero;
    for i in 1..=n + 1 {
        let d = spacing(v, i, params);
        let dd = if i > 1 && i <= n && v[i - 2] == v[i - 1] {
            // d log f / d theta, scaled back by f: one-observation score times f
            let one = OrderedSample::from_sorted(vec![v[i - 1]]).expect("finite value");
            score(&one, params).map(|s| s * d)
        } else {
            let upper = if i <= n { params.cdf_gradient(v[i - 1]) } else { zero };
            let lower = if i > 1 { params.cdf_gradient(v[i - 2]) } else { zero };
            [upper[0] - lower[0], upper[1] - lower[1], upper[2] - lower[2]]
        };
        for j in 0..3 {
            g[j] = g[j] - dd[j] / d;
        }
    }
    let scale = T::count(n + 1).recip();
    g.map(|x| x * scale)
}

fn ade_evaluation<T: Scalar>(sample: &OrderedSample<T>, params: &AsnParams<T>) -> Evaluation<T> {
    let v = sample.values();
    let n = v.len();
    let mut clamped = false;
    let mut acc = T::zero();
    for i in 1..=n {
        let lf = floor_log(params.cdf(v[i - 1]), &mut clamped);
        let ls = floor_log(params.survival(v[n - i]), &mut clamped);
        acc = acc + T::count(2 * i - 1) * (lf + ls);
    }
    Evaluation { value: -T::count(n) - acc / T::count(n), clamped }
}

/// `A = -n - (1/n) sum (2i-1) [log F(t_(i)) + log S(t_(n+1-i))]`
pub fn ade_objective<T: Scalar>(sample: &OrderedSample<T>, params: &AsnParams<T>) -> T {
    ade_evaluation(sample, params).value
}

fn ade_gradient<T: Scalar>(sample: &OrderedSample<T>, params: &AsnParams<T>) -> [T; 3] {
    let v = sample.values();
    let n = v.len();
    let mut g = [T::zero(); 3];
    for i in 1..=n {
        let (lo, hi) = (v[i - 1], v[n - i]);
        let (f, s) = (params.cdf(lo), params.survival(hi));
        let (dl, dh) = (params.cdf_gradient(lo), params.cdf_gradient(hi));
        let w = T::count(2 * i - 1);
        for j in 0..3 {
            g[j] = g[j] - w * (dl[j] / f - dh[j] / s);
        }
    }
    g.map(|x| x / T::count(n))
}

fn rade_evaluation<T: Scalar>(sample: &OrderedSample<T>, params: &AsnParams<T>) -> Evaluation<T> {
    let v = sample.values();
    let n = v.len();
    let mut clamped = false;
    let mut cdf_sum = T::zero();
    let mut log_sum = T::zero();
    for i in 1..=n {
        cdf_sum = cdf_sum + params.cdf(v[i - 1]);
        log_sum = log_sum + T::count(2 * i - 1) * floor_log(params.survival(v[n - i]), &mut clamped);
    }
    let value = T::count(n) / T::lit(2.0) - T::lit(2.0) * cdf_sum - log_sum / T::count(n);
    Evaluation { value, clamped }
}

/// `R = n/2 - 2 sum F(t_(i)) - (1/n) sum (2i-1) log S(t_(n+1-i))`
pub fn rade_objective<T: Scalar>(sample: &OrderedSample<T>, params: &AsnParams<T>) -> T {
    rade_evaluation(sample, params).value
}

fn rade_gradient<T: Scalar>(sample: &OrderedSample<T>, params: &AsnParams<T>) -> [T; 3] {
    let v = sample.values();
    let n = v.len();
    let mut g = [T::zero(); 3];
    for i in 1..=n {
        let dl = params.cdf_gradient(v[i - 1]);
        let hi = v[n - i];
        let dh = params.cdf_gradient(hi);
        let s = params.survival(hi);
        let w = T::count(2 * i - 1) / T::count(n);
        for j in 0..3 {
            g[j] = g[j] - T::lit(2.0) * dl[j] + w * dh[j] / s;
        }
    }
    g
}

/// Grid of candidate skewness starts ordered by increasing `|alpha|`
/// (positive before negative), so the first strict minimum wins ties.
fn alpha_grid<T: Scalar>() -> impl Iterator<Item = T> {
    std::iter::once(T::zero()).chain((1..=ALPHA_GRID_HALF_STEPS).flat_map(|k| {
        let a = T::count(k as usize) * T::lit(0.5);
        [a, -a]
    }))
}

/// Data-driven start: sample mean, population standard deviation, and the
/// grid value of `alpha` minimizing the method's objective at those two.
pub fn initialize<T: Scalar>(sample: &OrderedSample<T>, method: Method) -> Result<AsnParams<T>> {
    sample.require_fit_size()?;
    let mu = sample.mean();
    let sigma = sample.population_sd();
    if !(sigma > T::zero()) {
        return Err(Error::DegenerateData("sample has zero variance".into()));
    }
    let mut best: Option<(T, T)> = None;
    for alpha in alpha_grid::<T>() {
        let value = method.objective(sample, &AsnParams::new(mu, sigma, alpha)?);
        let better = match best {
            None => !value.is_nan(),
            Some((_, b)) => value < b,
        };
        if better {
            best = Some((alpha, value));
        }
    }
    let alpha = best.map_or(T::zero(), |(a, _)| a);
    AsnParams::new(mu, sigma, alpha)
}

/// Estimated parameters with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult<T> {
    pub method: Method,
    pub params: AsnParams<T>,
    pub objective: T,
    pub converged: bool,
    pub iterations: usize,
    pub restarts: usize,
    /// Standard errors of `(mu, sigma, alpha)` from the inverse observed
    /// information; MLE and MPS only, and only when that matrix is positive
    /// definite.
    pub stderr: Option<[T; 3]>,
    pub init: AsnParams<T>,
    /// Some CDF, survival or spacing value was floored before its log.
    pub clamped: bool,
}

/// Initial simplex edges in `(mu, ln sigma, alpha)`, scaled by the start's
/// sigma so the search is affine equivariant.
fn simplex_steps<T: Scalar>(start: &AsnParams<T>) -> [T; 3] {
    [T::lit(0.5) * start.sigma(), T::lit(0.25), T::lit(0.5)]
}

/// Mean and standard deviation of `ASN(0, 1, alpha)`: with
/// `f = (2 - 2 alpha x + alpha^2 x^2) phi(x) / (2 + alpha^2)`, `E[X] =
/// -2 alpha / (2 + alpha^2)` and `E[X^2] = (2 + 3 alpha^2) / (2 + alpha^2)`.
fn standard_moments<T: Scalar>(alpha: T) -> (T, T) {
    let two = T::lit(2.0);
    let nrm = two + alpha * alpha;
    let mean = -two * alpha / nrm;
    let second = (two + T::lit(3.0) * alpha * alpha) / nrm;
    (mean, (second - mean * mean).sqrt())
}

/// Grid starts whose location and scale reproduce the sample mean and
/// standard deviation for each candidate skewness. Returns the local minima
/// of the objective along the grid, best first, at most `limit` of them.
pub fn moment_matched_starts<T: Scalar>(sample: &OrderedSample<T>, method: Method, limit: usize) -> Result<Vec<AsnParams<T>>> {
    sample.require_fit_size()?;
    let (m, sd) = (sample.mean(), sample.population_sd());
    if !(sd > T::zero()) {
        return Err(Error::DegenerateData("sample has zero variance".into()));
    }
    let mut grid: Vec<(AsnParams<T>, T)> = Vec::new();
    for k in -ALPHA_GRID_HALF_STEPS..=ALPHA_GRID_HALF_STEPS {
        let alpha = T::lit(f64::from(k) * 0.5);
        let (sm, ss) = standard_moments(alpha);
        let sigma = sd / ss;
        let p = AsnParams::new(m - sigma * sm, sigma, alpha)?;
        let v = method.objective(sample, &p);
        grid.push((p, if v.is_nan() { T::infinity() } else { v }));
    }
    let mut minima: Vec<(AsnParams<T>, T)> = (0..grid.len())
        .filter(|&i| {
            let v = grid[i].1;
            v.is_finite() && (i == 0 || v <= grid[i - 1].1) && (i + 1 == grid.len() || v <= grid[i + 1].1)
        })
        .map(|i| grid[i])
        .collect();
    minima.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    minima.truncate(limit);
    Ok(minima.into_iter().map(|(p, _)| p).collect())
}

/// Fits `method` starting from the data-driven initializer.
pub fn fit<T: Scalar>(sample: &OrderedSample<T>, method: Method) -> Result<FitResult<T>> {
    let init = initialize(sample, method)?;
    let mut best = fit_from(sample, method, init)?;
    for start in moment_matched_starts(sample, method, 3)? {
        let cand = fit_from(sample, method, start)?;
        if better(&cand, &best) {
            best = cand;
        }
    }
    Ok(best)
}

fn better<T: Scalar>(cand: &FitResult<T>, incumbent: &FitResult<T>) -> bool {
    match (cand.converged, incumbent.converged) {
        (true, false) => true,
        (false, true) => false,
        _ => cand.objective < incumbent.objective,
    }
}

/// Fits `method` from an explicit start.
pub fn fit_from<T: Scalar>(sample: &OrderedSample<T>, method: Method, init: AsnParams<T>) -> Result<FitResult<T>> {
    sample.require_fit_size()?;
    let objective = |x: &[T; 3]| match AsnParams::new(x[0], x[1].exp(), x[2]) {
        Ok(p) => method.objective(sample, &p),
        Err(_) => T::infinity(),
    };
    let start = [init.mu(), init.sigma().ln(), init.alpha()];
    let run = NelderMead::new().with_steps(simplex_steps(&init)).minimize(objective, start);
    let [mu, s, alpha] = run.argmin;
    let params = AsnParams::new(mu, s.exp(), alpha)
        .map_err(|e| Error::Convergence(format!("optimizer left the parameter space: {e}")))?;
    let eval = method.evaluate(sample, &params);
    let stderr = match method {
        Method::Mle | Method::Mps => standard_errors(sample, method, &params),
        _ => None,
    };
    Ok(FitResult {
        method,
        params,
        objective: eval.value,
        converged: run.converged && eval.value.is_finite(),
        iterations: run.iterations,
        restarts: run.restarts,
        stderr,
        init,
        clamped: eval.clamped,
    })
}

/// Square roots of the diagonal of the inverse observed information. For MPS
/// the information is taken from `-sum log D_i`, the analogue of `-l`.
pub fn standard_errors<T: Scalar>(sample: &OrderedSample<T>, method: Method, params: &AsnParams<T>) -> Option<[T; 3]> {
    let scale = match method {
        Method::Mle => T::one(),
        Method::Mps => T::count(sample.len() + 1),
        _ => return None,
    };
    let f = |x: &[T; 3]| match AsnParams::new(x[0], x[1], x[2]) {
        Ok(p) => scale * method.objective(sample, &p),
        Err(_) => T::nan(),
    };
    let hess = numeric_hessian(f, &params.to_array()).ok()?;
    let cov = invert_spd(&hess)?;
    let se = [cov[0][0].sqrt(), cov[1][1].sqrt(), cov[2][2].sqrt()];
    se.iter().all(|v| v.is_finite()).then_some(se)
}
