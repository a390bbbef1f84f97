//! Replicated sampling and fitting to estimate per-parameter bias and MSE of
//! each estimator.
//!
//! Replication `k` at sample size `n` draws from a ChaCha stream keyed by the
//! master seed with stream id `(n << 32) | k`, so every replication can run
//! on any thread and the report does not depend on scheduling. All methods
//! are fitted to the same draw.

use std::collections::BTreeSet;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::AsnParams;
use crate::error::{Error, Result};
use crate::estimators::{fit, fit_from, Method};
use crate::sample::OrderedSample;
use crate::scalar::Scalar;

/// Where each replication's optimizer starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitMode {
    /// Moment-plus-grid initializer computed from the sample.
    #[default]
    Data,
    /// The generating parameters.
    Truth,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig<T> {
    pub truth: AsnParams<T>,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub methods: BTreeSet<Method>,
    pub master_seed: u64,
    pub init: InitMode,
}

impl<T: Scalar> SimConfig<T> {
    pub fn new(truth: AsnParams<T>, n_grid: Vec<usize>, replications: usize, methods: impl IntoIterator<Item = Method>, master_seed: u64) -> Result<Self> {
        let config = Self {
            truth,
            n_grid,
            replications,
            methods: methods.into_iter().collect(),
            master_seed,
            init: InitMode::Data,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_init(mut self, init: InitMode) -> Self {
        self.init = init;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Domain("replications must be at least 1".into()));
        }
        if self.n_grid.is_empty() {
            return Err(Error::Domain("sample-size grid is empty".into()));
        }
        if let Some(&n) = self.n_grid.iter().find(|&&n| n < 10) {
            return Err(Error::Domain(format!("sample sizes must be at least 10, got {n}")));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("sample-size grid must be strictly increasing".into()));
        }
        if self.n_grid.iter().any(|&n| n > u32::MAX as usize) || self.replications > u32::MAX as usize {
            return Err(Error::Domain("sample size and replication count must fit in 32 bits".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Domain("no estimation methods selected".into()));
        }
        Ok(())
    }
}

/// Bias and MSE of one method at one sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellSummary<T> {
    pub method: Method,
    pub n: usize,
    /// `(mu, sigma, alpha)`; `None` when every replication failed.
    pub bias: Option<[T; 3]>,
    pub mse: Option<[T; 3]>,
    pub successes: usize,
    pub failure_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport<T> {
    pub config: SimConfig<T>,
    /// Ordered by `n`, then by method.
    pub cells: Vec<CellSummary<T>>,
}

impl<T: Scalar> SimulationReport<T> {
    pub fn cell(&self, method: Method, n: usize) -> Option<&CellSummary<T>> {
        self.cells.iter().find(|c| c.method == method && c.n == n)
    }
}

/// Mean signed error and mean squared error of `estimates` about `truth`.
pub fn bias_mse<T: Scalar>(estimates: &[AsnParams<T>], truth: &AsnParams<T>) -> Result<([T; 3], [T; 3])> {
    if estimates.is_empty() {
        return Err(Error::Domain("no estimates to summarize".into()));
    }
    let th = truth.to_array();
    let mut bias = [T::zero(); 3];
    let mut mse = [T::zero(); 3];
    for e in estimates {
        for (j, v) in e.to_array().into_iter().enumerate() {
            let err = v - th[j];
            bias[j] = bias[j] + err;
            mse[j] = mse[j] + err * err;
        }
    }
    let n = T::count(estimates.len());
    Ok((bias.map(|b| b / n), mse.map(|m| m / n)))
}

/// Independent random stream for replication `k` at sample size `n`.
pub fn replication_rng(master_seed: u64, n: usize, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((n as u64) << 32) | k as u64);
    rng
}

/// Runs the study with inverse-transform sampling from the truth.
pub fn run_study<T: Scalar>(config: &SimConfig<T>) -> Result<SimulationReport<T>> {
    run_study_with(config, |truth, n, rng| truth.sample(n, rng))
}

/// Runs the study with a caller-supplied sampler.
pub fn run_study_with<T, S>(config: &SimConfig<T>, sampler: S) -> Result<SimulationReport<T>>
where
    T: Scalar,
    S: Fn(&AsnParams<T>, usize, &mut ChaCha8Rng) -> Vec<T> + Sync,
{
    config.validate()?;
    let methods: Vec<Method> = config.methods.iter().copied().collect();
    let mut cells = Vec::with_capacity(config.n_grid.len() * methods.len());
    for &n in &config.n_grid {
        // Per replication: one Option<params> per method, in method order.
        let outcomes: Vec<Vec<Option<AsnParams<T>>>> = (0..config.replications)
            .into_par_iter()
            .map(|k| {
                let mut rng = replication_rng(config.master_seed, n, k);
                let draws = sampler(&config.truth, n, &mut rng);
                let sample = match OrderedSample::new(draws) {
                    Ok(s) => s,
                    Err(_) => return vec![None; methods.len()],
                };
                methods
                    .iter()
                    .map(|&m| {
                        let result = match config.init {
                            InitMode::Data => fit(&sample, m),
                            InitMode::Truth => fit_from(&sample, m, config.truth),
                        };
                        result.ok().filter(|r| r.converged).map(|r| r.params)
                    })
                    .collect()
            })
            .collect();
        for (mi, &method) in methods.iter().enumerate() {
            let ok: Vec<AsnParams<T>> = outcomes.iter().filter_map(|row| row[mi]).collect();
            let summary = bias_mse(&ok, &config.truth).ok();
            cells.push(CellSummary {
                method,
                n,
                bias: summary.map(|s| s.0),
                mse: summary.map(|s| s.1),
                successes: ok.len(),
                failure_count: config.replications - ok.len(),
            });
        }
    }
    Ok(SimulationReport { config: config.clone(), cells })
}
