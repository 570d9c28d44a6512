//! Iterated-logarithm tracking along a single path.
//!
//! The normalised value at `n` is `(gamma / sqrt(2 n ln ln n)) sum_{k<=n} ln(S_k/(k mu))`.
//! Checkpoints are geometric, `n_j = ceil(n0 rho^j)`, and the path is extended
//! once, so each checkpoint costs only the new terms.

use serde::Serialize;

use crate::error::{out_of_range, Error, Result};
use crate::extremal::{envelope, limit_set_score, LimitSetScore};
use crate::mcengine::{derive_stream, ExperimentConfig};
use crate::prodsum::{lil_scale, LogRatioPrefix};
use crate::summation::NeumaierSum;
use crate::variates::{DistributionSpec, SamplePath};
use crate::wiener::GridFunction;

/// `(gamma / sqrt(2 n ln ln n)) sum_{k<=n} ln(S_k/(k mu))` for the full path.
pub fn lil_normalized(path: &SamplePath, spec: &DistributionSpec) -> Result<f64> {
    lil_scale(path.n())?;
    LogRatioPrefix::new(path, spec)?.lil_at(1.0)
}

/// `ceil(n0 rho^j)` for `j = 0, 1, ...` up to `n_max`, deduplicated, with
/// `n_max` appended when the geometric sequence does not land on it.
pub fn checkpoints(n0: usize, rho: f64, n_max: usize) -> Result<Vec<usize>> {
    if n0 < 3 {
        return Err(out_of_range("n0", format!("n0 >= 3 required, got {n0}")));
    }
    if !(rho > 1.0 && rho.is_finite()) {
        return Err(out_of_range("rho", format!("rho > 1 required, got {rho}")));
    }
    if n_max < n0 {
        return Err(out_of_range("n", format!("n >= n0 = {n0} required, got {n_max}")));
    }
    let mut out: Vec<usize> = Vec::new();
    let mut j = 0i32;
    loop {
        let x = (n0 as f64 * rho.powi(j)).ceil();
        if x > n_max as f64 {
            break;
        }
        let k = x as usize;
        if out.last() != Some(&k) {
            out.push(k);
        }
        j += 1;
    }
    if out.last() != Some(&n_max) {
        out.push(n_max);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LilPoint {
    pub n: usize,
    pub value: f64,
    pub running_max: f64,
}

/// Trajectory of the normalised value at the checkpoints. The sum of
/// log-ratios is carried forward between checkpoints.
pub fn run_lil_on_path(path: &SamplePath, spec: &DistributionSpec, points: &[usize]) -> Result<Vec<LilPoint>> {
    let mu = spec.mu();
    let gamma = spec.gamma();
    let mut acc = NeumaierSum::new();
    let mut k = 0usize;
    let mut running_max = f64::NEG_INFINITY;
    let mut out = Vec::with_capacity(points.len());
    for &n in points {
        if n > path.n() || n <= k && k > 0 {
            return Err(out_of_range(
                "checkpoint",
                format!("increasing checkpoints within 1..={} required", path.n()),
            ));
        }
        while k < n {
            let s = path.values()[k];
            if !(s > 0.0) {
                return Err(Error::NonPositive { index: k + 1, value: s });
            }
            acc.add((s / ((k + 1) as f64 * mu)).ln());
            k += 1;
        }
        let value = gamma / lil_scale(n)? * acc.value();
        running_max = running_max.max(value);
        out.push(LilPoint { n, value, running_max });
    }
    Ok(out)
}

/// Path on `[0, 1]` with value at `x` equal to
/// `(gamma / sqrt(2 n ln ln n)) sum_{k<=[n x]} ln(S_k/(k mu))`.
pub fn strassen_scaled_path(path: &SamplePath, spec: &DistributionSpec, m: usize) -> Result<GridFunction> {
    let scale = spec.gamma() / lil_scale(path.n())?;
    LogRatioPrefix::new(path, spec)?.grid(m, scale)
}

/// `max_i (|g(x_i)| - sqrt(2 x_i))` over the grid nodes.
pub fn envelope_slack(g: &GridFunction) -> Result<f64> {
    if g.horizon() != 1.0 {
        return Err(Error::Grid(format!(
            "expected a unit-horizon grid, got horizon {}",
            g.horizon()
        )));
    }
    (0..=g.m()).try_fold(f64::NEG_INFINITY, |acc, i| {
        Ok(acc.max(g.values()[i].abs() - envelope(g.time(i))?))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LilReport {
    pub trajectory: Vec<LilPoint>,
    #[serde(skip)]
    pub scaled_path: GridFunction,
    pub envelope_slack: f64,
    pub limit_set: LimitSetScore,
}

/// Follows one path (stream 0 of the master seed) to `config.n`.
pub fn run_lil(config: &ExperimentConfig) -> Result<LilReport> {
    let points = checkpoints(config.lil.n0.min(config.n), config.lil.rho, config.n)?;
    let mut stream = derive_stream(config.master_seed, 0);
    let path = config.model.generate(&config.spec, config.n, &mut stream)?;
    lil_report(&path, &config.spec, &points, config.m, config.ridge)
}

/// Trajectory, scaled path and limit-set diagnostics for a given path.
pub fn lil_report(
    path: &SamplePath,
    spec: &DistributionSpec,
    points: &[usize],
    m: usize,
    ridge: Option<f64>,
) -> Result<LilReport> {
    let trajectory = run_lil_on_path(path, spec, points)?;
    let scaled_path = strassen_scaled_path(path, spec, m)?;
    Ok(LilReport {
        trajectory,
        envelope_slack: envelope_slack(&scaled_path)?,
        limit_set: limit_set_score(&scaled_path, m, ridge)?,
        scaled_path,
    })
}
