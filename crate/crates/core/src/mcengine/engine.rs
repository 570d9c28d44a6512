//! Experiment execution. Replications run on a rayon pool sized by
//! `workers_hint`; outputs are assembled in replication-index order, so the
//! result never depends on the worker count or completion order.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, Kind};
use super::ks::{ks_distance, normal_cdf};
use super::stream::{derive_stream, SeedStream};
use super::summary::{covariance, Summary};
use crate::checks::{run_checks, CheckOutcome};
use crate::error::{Error, Result};
use crate::extremal::{extremal_table, ExtremalRow};
use crate::lil::{run_lil, LilReport};
use crate::prodsum::{log_prod_statistic, LogRatioPrefix};
use crate::wiener::limit_covariance;

/// Identifies how every random number in an experiment was produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedProvenance {
    pub master_seed: u64,
    pub stream_scheme: &'static str,
    pub library: &'static str,
    pub version: &'static str,
}

impl SeedProvenance {
    pub fn new(master_seed: u64) -> Self {
        Self {
            master_seed,
            stream_scheme: "chacha8(key=master_seed, stream=replication_index)",
            library: env!("CARGO_PKG_NAME"),
            version: crate::VERSION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WallClock {
    pub started_unix_seconds: f64,
    pub elapsed_seconds: f64,
}

/// Empirical against limiting covariance across the evaluation times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceComparison {
    pub empirical: Vec<Vec<f64>>,
    pub limit: Vec<Vec<f64>>,
}

impl CovarianceComparison {
    /// `(empirical, limit)` at the grid entries closest to `(s, t)`.
    pub fn at(&self, t_grid: &[f64], s: f64, t: f64) -> Option<(f64, f64)> {
        let i = t_grid.iter().position(|x| (x - s).abs() < 1e-12)?;
        let j = t_grid.iter().position(|x| (x - t).abs() < 1e-12)?;
        Some((self.empirical[i][j], self.limit[i][j]))
    }
}

/// Output of the replicated kinds (`clt`, `fclt`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicatedOutput {
    pub t_grid: Vec<f64>,
    /// Variance of the Gaussian limit at each time, `2t`.
    pub target_variance: Vec<f64>,
    pub summaries: Vec<Summary>,
    /// KS distance to `Normal(0, 2t)` at each time.
    pub ks_distance: Vec<f64>,
    /// `samples[i][r]`: replication `r` at `t_grid[i]`; empty unless retained.
    #[serde(skip)]
    pub samples: Vec<Vec<f64>>,
    pub covariance: Option<CovarianceComparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Output {
    Replicated(ReplicatedOutput),
    Lil(LilReport),
    Extremal { rows: Vec<ExtremalRow> },
    Check { outcomes: Vec<CheckOutcome> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub provenance: SeedProvenance,
    pub wall_clock: WallClock,
    pub output: Output,
}

impl ExperimentResult {
    pub fn replicated(&self) -> Option<&ReplicatedOutput> {
        match &self.output {
            Output::Replicated(r) => Some(r),
            _ => None,
        }
    }
}

/// Runs `f` on a pool with `workers` threads (0 = one per core).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("workers: {e}")))?;
    Ok(pool.install(f))
}

/// Evaluates `f` on the stream of every replication `0..r`, in index order.
/// The first failing replication (by index) aborts the batch.
pub fn replicate<T, F>(master_seed: u64, r: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut SeedStream) -> Result<T> + Sync,
{
    let results: Vec<Result<T>> = (0..r as u64)
        .into_par_iter()
        .map(|i| f(&mut derive_stream(master_seed, i)))
        .collect();
    results
        .into_iter()
        .enumerate()
        .map(|(i, res)| {
            res.map_err(|e| Error::Replication {
                index: i as u64,
                source: Box::new(e),
            })
        })
        .collect()
}

fn summarise(t_grid: Vec<f64>, samples: Vec<Vec<f64>>, retain: bool) -> Result<ReplicatedOutput> {
    let mut summaries = Vec::with_capacity(t_grid.len());
    let mut ks = Vec::with_capacity(t_grid.len());
    let mut target_variance = Vec::with_capacity(t_grid.len());
    for (t, xs) in t_grid.iter().zip(&samples) {
        let var = limit_covariance(*t, *t)?;
        target_variance.push(var);
        summaries.push(Summary::from_samples(xs));
        ks.push(ks_distance(xs, normal_cdf(0.0, var))?);
    }
    let covariance = if t_grid.len() > 1 && samples[0].len() > 1 {
        let k = t_grid.len();
        let mut empirical = vec![vec![0.0; k]; k];
        let mut limit = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in 0..k {
                empirical[i][j] = covariance(&samples[i], &samples[j]).expect("R > 1");
                limit[i][j] = limit_covariance(t_grid[i], t_grid[j])?;
            }
        }
        Some(CovarianceComparison { empirical, limit })
    } else {
        None
    };
    Ok(ReplicatedOutput {
        t_grid,
        target_variance,
        summaries,
        ks_distance: ks,
        samples: if retain { samples } else { Vec::new() },
        covariance,
    })
}

/// `R` replications of the log statistic at sample size `n`, compared with `Normal(0, 2)`.
pub fn run_clt(config: &ExperimentConfig) -> Result<ReplicatedOutput> {
    let spec = config.spec;
    let values = replicate(config.master_seed, config.replications, |stream| {
        let path = config.model.generate(&spec, config.n, stream)?;
        log_prod_statistic(&path, &spec)
    })?;
    summarise(vec![1.0], vec![values], config.retain_samples)
}

/// `R` replications of the log-product path read at every time in `t_grid`.
pub fn run_fclt(config: &ExperimentConfig) -> Result<ReplicatedOutput> {
    let spec = config.spec;
    let rows = replicate(config.master_seed, config.replications, |stream| {
        let path = config.model.generate(&spec, config.n, stream)?;
        let prefix = LogRatioPrefix::new(&path, &spec)?;
        Ok(config.t_grid.iter().map(|&t| prefix.clt_at(t)).collect::<Vec<f64>>())
    })?;
    let samples = (0..config.t_grid.len())
        .map(|i| rows.iter().map(|row| row[i]).collect())
        .collect();
    summarise(config.t_grid.clone(), samples, config.retain_samples)
}

/// Validates `config` and runs the experiment it describes.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0);
    let clock = Instant::now();
    let output = with_workers(config.workers_hint, || -> Result<Output> {
        Ok(match config.kind {
            Kind::Clt => Output::Replicated(run_clt(config)?),
            Kind::Fclt => Output::Replicated(run_fclt(config)?),
            Kind::Lil => Output::Lil(run_lil(config)?),
            Kind::Extremal => Output::Extremal {
                rows: extremal_table(&config.t_grid, config.m)?,
            },
            Kind::Check => Output::Check { outcomes: run_checks() },
        })
    })??;
    Ok(ExperimentResult {
        config: config.clone(),
        provenance: SeedProvenance::new(config.master_seed),
        wall_clock: WallClock {
            started_unix_seconds: started,
            elapsed_seconds: clock.elapsed().as_secs_f64(),
        },
        output,
    })
}
