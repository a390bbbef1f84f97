//! Derivative-free minimization, monotone root finding and finite-difference
//! derivatives.
//!
//! Every estimator in [`crate::estimators`] is minimized by the same
//! Nelder–Mead kernel over an unconstrained point (`mu`, `ln sigma`, `alpha`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Iteration cap for a single simplex run.
pub const MAX_ITERATIONS: usize = 5000;
/// Simplex diameter tolerance, relative to `max(1, |x|)`.
pub const X_TOLERANCE: f64 = 1e-8;
/// Spread of simplex values, relative to `max(1, |f|)`.
pub const F_TOLERANCE: f64 = 1e-10;

const REFLECTION: f64 = 1.0;
const EXPANSION: f64 = 2.0;
const CONTRACTION: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Outcome of a [`NelderMead`] run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimResult<T, const N: usize> {
    #[serde(with = "serde_array")]
    pub argmin: [T; N],
    pub value: T,
    pub iterations: usize,
    pub converged: bool,
    pub restarts: usize,
}

/// Nelder–Mead simplex minimizer with standard coefficients and one
/// automatic restart from the incumbent.
#[derive(Debug, Clone, Copy)]
pub struct NelderMead<T, const N: usize> {
    steps: Option<[T; N]>,
    max_iterations: usize,
}

impl<T: Scalar, const N: usize> Default for NelderMead<T, N> {
    fn default() -> Self {
        Self { steps: None, max_iterations: MAX_ITERATIONS }
    }
}

impl<T: Scalar, const N: usize> NelderMead<T, N> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Edge lengths of the initial simplex along each axis.
    pub fn with_steps(mut self, steps: [T; N]) -> Self {
        self.steps = Some(steps);
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    fn steps_for(&self, start: &[T; N]) -> [T; N] {
        self.steps.unwrap_or_else(|| {
            let mut s = [T::zero(); N];
            for (si, xi) in s.iter_mut().zip(start) {
                *si = T::lit(0.1) * xi.abs().max(T::one());
            }
            s
        })
    }

    /// Minimizes `objective` from `start`. Non-finite objective values are
    /// treated as `+inf`, so they never win a comparison.
    pub fn minimize<F>(&self, objective: F, start: [T; N]) -> OptimResult<T, N>
    where
        F: Fn(&[T; N]) -> T,
    {
        let eval = |x: &[T; N]| {
            let v = objective(x);
            if v.is_nan() {
                T::infinity()
            } else {
                v
            }
        };
        let steps = self.steps_for(&start);
        let first = self.run(&eval, start, &steps);
        let second = self.run(&eval, first.0, &steps);
        OptimResult {
            argmin: second.0,
            value: second.1,
            iterations: first.2 + second.2,
            converged: second.3,
            restarts: 1,
        }
    }

    fn run<F>(&self, eval: &F, start: [T; N], steps: &[T; N]) -> ([T; N], T, usize, bool)
    where
        F: Fn(&[T; N]) -> T,
    {
        let xtol = T::lit(X_TOLERANCE).max(T::epsilon() * T::lit(64.0));
        let ftol = T::lit(F_TOLERANCE).max(T::epsilon() * T::lit(64.0));

        let mut simplex: Vec<([T; N], T)> = Vec::with_capacity(N + 1);
        simplex.push((start, eval(&start)));
        for i in 0..N {
            let mut x = start;
            x[i] = x[i] + steps[i];
            simplex.push((x, eval(&x)));
        }

        let mut iterations = 0;
        loop {
            // Stable sort keeps earlier vertices ahead on ties.
            simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            if converged(&simplex, xtol, ftol) {
                return (simplex[0].0, simplex[0].1, iterations, true);
            }
            if iterations >= self.max_iterations {
                return (simplex[0].0, simplex[0].1, iterations, false);
            }
            iterations += 1;

            let worst = simplex[N];
            let mut centroid = [T::zero(); N];
            for (x, _) in &simplex[..N] {
                for j in 0..N {
                    centroid[j] = centroid[j] + x[j];
                }
            }
            let inv = T::count(N).recip();
            for c in centroid.iter_mut() {
                *c = *c * inv;
            }
            let along = |coef: f64| {
                let mut x = [T::zero(); N];
                for j in 0..N {
                    x[j] = centroid[j] + T::lit(coef) * (centroid[j] - worst.0[j]);
                }
                x
            };

            let xr = along(REFLECTION);
            let fr = eval(&xr);
            if fr < simplex[0].1 {
                let xe = along(REFLECTION * EXPANSION);
                let fe = eval(&xe);
                simplex[N] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[N - 1].1 {
                simplex[N] = (xr, fr);
                continue;
            }
            if fr < worst.1 {
                let xc = along(REFLECTION * CONTRACTION);
                let fc = eval(&xc);
                if fc <= fr {
                    simplex[N] = (xc, fc);
                    continue;
                }
            } else {
                let xcc = along(-CONTRACTION);
                let fcc = eval(&xcc);
                if fcc < worst.1 {
                    simplex[N] = (xcc, fcc);
                    continue;
                }
            }
            let best = simplex[0].0;
            for vertex in simplex.iter_mut().skip(1) {
                let mut x = vertex.0;
                for j in 0..N {
                    x[j] = best[j] + T::lit(SHRINK) * (x[j] - best[j]);
                }
                *vertex = (x, eval(&x));
            }
        }
    }
}

fn converged<T: Scalar, const N: usize>(simplex: &[([T; N], T)], xtol: T, ftol: T) -> bool {
    let (best, fbest) = simplex[0];
    let fworst = simplex[N].1;
    if !fbest.is_finite() || !fworst.is_finite() {
        return false;
    }
    let scale = best.iter().fold(T::one(), |m, v| m.max(v.abs()));
    let diameter = simplex[1..]
        .iter()
        .flat_map(|(x, _)| x.iter().zip(best.iter()).map(|(a, b)| (*a - *b).abs()))
        .fold(T::zero(), T::max);
    diameter <= xtol * scale && fworst - fbest <= ftol * fbest.abs().max(T::one())
}

/// Minimizes with the default initial simplex.
pub fn minimize<T, F, const N: usize>(objective: F, start: [T; N]) -> OptimResult<T, N>
where
    T: Scalar,
    F: Fn(&[T; N]) -> T,
{
    NelderMead::new().minimize(objective, start)
}

/// Finite-difference step for coordinate value `x`.
#[inline]
fn fd_step<T: Scalar>(x: T) -> T {
    T::lit(1e-5) * x.abs().max(T::one())
}

fn checked<T: Scalar>(value: T, coordinate: usize) -> Result<T> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain(format!("non-finite objective in stencil along coordinate {coordinate}")))
    }
}

/// Central-difference gradient.
pub fn numeric_gradient<T, F, const N: usize>(objective: F, at: &[T; N]) -> Result<[T; N]>
where
    T: Scalar,
    F: Fn(&[T; N]) -> T,
{
    let mut grad = [T::zero(); N];
    for i in 0..N {
        let h = fd_step(at[i]);
        let mut up = *at;
        let mut down = *at;
        up[i] = at[i] + h;
        down[i] = at[i] - h;
        let fu = checked(objective(&up), i)?;
        let fd = checked(objective(&down), i)?;
        grad[i] = (fu - fd) / (up[i] - down[i]);
    }
    Ok(grad)
}

/// Central-difference Hessian, symmetrized as `(H + H^T) / 2`.
pub fn numeric_hessian<T, F, const N: usize>(objective: F, at: &[T; N]) -> Result<[[T; N]; N]>
where
    T: Scalar,
    F: Fn(&[T; N]) -> T,
{
    let f0 = checked(objective(at), 0)?;
    let h: [T; N] = std::array::from_fn(|i| fd_step(at[i]));
    let shifted = |moves: &[(usize, T)]| {
        let mut x = *at;
        for &(i, d) in moves {
            x[i] = x[i] + d;
        }
        x
    };
    let mut hess = [[T::zero(); N]; N];
    for i in 0..N {
        let fp = checked(objective(&shifted(&[(i, h[i])])), i)?;
        let fm = checked(objective(&shifted(&[(i, -h[i])])), i)?;
        hess[i][i] = (fp - T::lit(2.0) * f0 + fm) / (h[i] * h[i]);
        for j in (i + 1)..N {
            let fpp = checked(objective(&shifted(&[(i, h[i]), (j, h[j])])), j)?;
            let fpm = checked(objective(&shifted(&[(i, h[i]), (j, -h[j])])), j)?;
            let fmp = checked(objective(&shifted(&[(i, -h[i]), (j, h[j])])), j)?;
            let fmm = checked(objective(&shifted(&[(i, -h[i]), (j, -h[j])])), j)?;
            hess[i][j] = (fpp - fpm - fmp + fmm) / (T::lit(4.0) * h[i] * h[j]);
        }
    }
    // Off-diagonals come from one symmetric stencil, so (H + H^T)/2 is a mirror.
    for i in 0..N {
        for j in (i + 1)..N {
            hess[j][i] = hess[i][j];
        }
    }
    Ok(hess)
}

/// Inverts a symmetric positive-definite matrix through its Cholesky factor.
/// Returns `None` when the matrix is not positive definite.
pub fn invert_spd<T: Scalar, const N: usize>(m: &[[T; N]; N]) -> Option<[[T; N]; N]> {
    let mut l = [[T::zero(); N]; N];
    for i in 0..N {
        for j in 0..=i {
            let mut s = m[i][j];
            for k in 0..j {
                s = s - l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > T::zero()) || !s.is_finite() {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    // inverse of L, lower triangular
    let mut linv = [[T::zero(); N]; N];
    for i in 0..N {
        linv[i][i] = l[i][i].recip();
        for j in 0..i {
            let mut s = T::zero();
            for k in j..i {
                s = s + l[i][k] * linv[k][j];
            }
            linv[i][j] = -s / l[i][i];
        }
    }
    let mut inv = [[T::zero(); N]; N];
    for i in 0..N {
        for j in 0..N {
            let mut s = T::zero();
            for k in i.max(j)..N {
                s = s + linv[k][i] * linv[k][j];
            }
            inv[i][j] = s;
        }
    }
    Some(inv)
}

/// Grows `[lo, hi]` by doubling its half-width about the midpoint until
/// `f(lo) <= 0 <= f(hi)` for an increasing `f`.
pub fn bracket_increasing<T, F>(f: F, lo: T, hi: T, max_doublings: usize) -> Result<(T, T)>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..=max_doublings {
        let (flo, fhi) = (f(lo), f(hi));
        if flo <= T::zero() && fhi >= T::zero() {
            return Ok((lo, hi));
        }
        let width = hi - lo;
        if flo > T::zero() {
            lo = lo - width;
        }
        if fhi < T::zero() {
            hi = hi + width;
        }
        if !lo.is_finite() || !hi.is_finite() {
            break;
        }
    }
    Err(Error::Convergence(format!("no sign change found after {max_doublings} doublings")))
}

/// Root of an increasing `f` inside a sign-changing bracket, by Newton steps
/// that fall back to bisection whenever they leave the bracket or stall.
pub fn solve_increasing<T, F, D>(f: F, derivative: D, lo: T, hi: T) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
    D: Fn(T) -> T,
{
    let (mut lo, mut hi) = (lo, hi);
    let half = T::lit(0.5);
    let mut x = lo + (hi - lo) * half;
    let mut prev_step = hi - lo;
    for _ in 0..500 {
        let fx = f(x);
        if fx == T::zero() {
            return Ok(x);
        }
        if fx < T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        let resolution = T::epsilon() * T::lit(2.0) * x.abs() + T::min_positive_value();
        if hi - lo <= resolution {
            return Ok(x);
        }
        let d = derivative(x);
        let newton = x - fx / d;
        let step = if d > T::zero()
            && newton > lo
            && newton < hi
            && (fx / d).abs() * T::lit(2.0) <= prev_step.abs()
        {
            newton - x
        } else {
            lo + (hi - lo) * half - x
        };
        if step.abs() <= resolution {
            return Ok(x + step);
        }
        prev_step = step;
        x = x + step;
    }
    Err(Error::Convergence("root solver exhausted its iteration budget".into()))
}

mod serde_array {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S, T, const N: usize>(value: &[T; N], s: S) -> Result<S::Ok, S::Error>
    where
        S: Serializer,
        T: Serialize,
    {
        value.as_slice().serialize(s)
    }

    pub fn deserialize<'de, D, T, const N: usize>(d: D) -> Result<[T; N], D::Error>
    where
        D: Deserializer<'de>,
        T: Deserialize<'de>,
    {
        let v = Vec::<T>::deserialize(d)?;
        let len = v.len();
        v.try_into().map_err(|_| D::Error::invalid_length(len, &"fixed-size array"))
    }
}
