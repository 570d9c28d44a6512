//! The product-of-sums statistic `(prod_{k<=n} S_k/(k mu))^(gamma/sqrt(n))`
//! in log space, its path version over `t in [0, 1]`, the rescaled
//! partial-sum process, and the diagnostics tied to the Wiener coupling.
//!
//! Logarithms are natural logarithms throughout. Sums of log-ratios use
//! compensated accumulation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};
use crate::mcengine::{derive_stream, SeedStream};
use crate::summation::NeumaierSum;
use crate::variates::{partial_sums, sample_iid, DistributionSpec, SamplePath};
use crate::wiener::{log_integral_functional, simulate_wiener, GridFunction, Interpretation};

/// `[n t]` with `t` snapped to the nearest integer multiple of `1/n` when it
/// is within rounding distance (so `0.29 * 100` gives 29, not 28).
pub fn floor_index(n: usize, t: f64) -> usize {
    let x = n as f64 * t;
    let r = x.round();
    let k = if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r
    } else {
        x.floor()
    };
    (k.max(0.0) as usize).min(n)
}

/// Compensated prefix sums of `ln(S_k / (k mu))`, the shared core of every
/// statistic in this module.
#[derive(Debug, Clone)]
pub struct LogRatioPrefix {
    gamma: f64,
    /// `prefix[k] = sum_{j<=k} ln(S_j/(j mu))`, `prefix[0] = 0`.
    prefix: Vec<f64>,
}

impl LogRatioPrefix {
    pub fn new(path: &SamplePath, spec: &DistributionSpec) -> Result<Self> {
        let mu = spec.mu();
        let mut prefix = Vec::with_capacity(path.n() + 1);
        prefix.push(0.0);
        let mut acc = NeumaierSum::new();
        for (i, &s) in path.values().iter().enumerate() {
            if !(s > 0.0) {
                return Err(Error::NonPositive { index: i + 1, value: s });
            }
            acc.add((s / ((i + 1) as f64 * mu)).ln());
            prefix.push(acc.value());
        }
        Ok(Self {
            gamma: spec.gamma(),
            prefix,
        })
    }

    pub fn n(&self) -> usize {
        self.prefix.len() - 1
    }

    /// `sum_{j<=k} ln(S_j/(j mu))`.
    pub fn sum_to(&self, k: usize) -> f64 {
        self.prefix[k]
    }

    /// `gamma / sqrt(n) * sum_{k<=[nt]} ln(S_k/(k mu))`.
    pub fn clt_at(&self, t: f64) -> f64 {
        let n = self.n();
        self.gamma / (n as f64).sqrt() * self.prefix[floor_index(n, t)]
    }

    /// The same sum under the `sqrt(2 n ln ln n)` normalisation; needs `n >= 3`.
    pub fn lil_at(&self, t: f64) -> Result<f64> {
        let n = self.n();
        Ok(self.gamma / lil_scale(n)? * self.prefix[floor_index(n, t)])
    }

    /// Step path on the unit grid with `m` cells, value at `i/m` equal to
    /// `scale * prefix[[n i / m]]`.
    pub fn grid(&self, m: usize, scale: f64) -> Result<GridFunction> {
        if m == 0 {
            return Err(out_of_range("m", "m >= 1 required"));
        }
        let n = self.n();
        let values = (0..=m).map(|i| scale * self.prefix[n * i / m]).collect();
        GridFunction::new(values, 1.0, Interpretation::CadlagStep)
    }
}

/// `sqrt(2 n ln ln n)`, defined for `n >= 3`.
pub fn lil_scale(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(out_of_range("n", format!("n >= 3 required for ln ln n, got {n}")));
    }
    let nf = n as f64;
    Ok((2.0 * nf * nf.ln().ln()).sqrt())
}

/// `(gamma / sqrt(n)) * sum_{k<=n} ln(S_k/(k mu))`, the log of the statistic.
pub fn log_prod_statistic(path: &SamplePath, spec: &DistributionSpec) -> Result<f64> {
    Ok(LogRatioPrefix::new(path, spec)?.clt_at(1.0))
}

/// Step path `t -> (gamma/sqrt(n)) sum_{k<=[nt]} ln(S_k/(k mu))` on a grid of `m` cells.
pub fn log_prod_path(path: &SamplePath, spec: &DistributionSpec, m: usize) -> Result<GridFunction> {
    let prefix = LogRatioPrefix::new(path, spec)?;
    let scale = spec.gamma() / (path.n() as f64).sqrt();
    prefix.grid(m, scale)
}

/// Rescaled partial-sum process `(S_[nt] - [nt] mu) / (sigma sqrt(n))` with `S_0 = 0`.
pub fn partial_sum_process(path: &SamplePath, spec: &DistributionSpec, m: usize) -> Result<GridFunction> {
    if m == 0 {
        return Err(out_of_range("m", "m >= 1 required"));
    }
    let n = path.n();
    let denom = spec.sigma() * (n as f64).sqrt();
    let values = (0..=m)
        .map(|i| {
            let k = n * i / m;
            (path.get(k) - k as f64 * spec.mu()) / denom
        })
        .collect();
    GridFunction::new(values, 1.0, Interpretation::CadlagStep)
}

/// `theta(x) = (ln(1 + x) - x) / x`, extended by `theta(0) = 0`.
pub fn theta_remainder(x: f64) -> Result<f64> {
    if !(x > -1.0) || !x.is_finite() {
        return Err(out_of_range("x", format!("x > -1 required, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.abs() < 1e-4 {
        // -x/2 + x^2/3 - x^3/4 + x^4/5
        return Ok(x * (-0.5 + x * (1.0 / 3.0 + x * (-0.25 + x * 0.2))));
    }
    Ok((x.ln_1p() - x) / x)
}

/// How sample paths are produced for an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PathModel {
    /// Partial sums of i.i.d. draws from the law.
    #[default]
    Iid,
    /// `S_k = k mu + sigma W(k)` for a simulated Wiener path (clipped at `k mu / 2`).
    Coupled,
    /// `S_k = k mu`.
    Deterministic,
}

impl PathModel {
    pub fn generate(&self, spec: &DistributionSpec, n: usize, stream: &mut SeedStream) -> Result<SamplePath> {
        match self {
            PathModel::Iid => partial_sums(&sample_iid(spec, n, stream)?),
            PathModel::Coupled => {
                if n == 0 {
                    return Err(out_of_range("n", "n >= 1 required"));
                }
                let w = simulate_wiener(n, n as f64, stream)?;
                Ok(coupled_path(spec, &w, n)?.path)
            }
            PathModel::Deterministic => SamplePath::deterministic(spec, n),
        }
    }
}

/// Monte Carlo estimate of `E|S_n - n mu| / sqrt(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct L1Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub replications: usize,
}

/// Estimates the uniform-L1 quantity `E|S_n - n mu|/sqrt(n)` over `r`
/// replications drawn from `model`, each on its own derived stream.
pub fn l1_condition_estimate(
    spec: &DistributionSpec,
    n: usize,
    r: usize,
    master_seed: u64,
    model: PathModel,
) -> Result<L1Estimate> {
    if n == 0 || r == 0 {
        return Err(out_of_range(
            "n, R",
            format!("n >= 1 and R >= 1 required, got n={n}, R={r}"),
        ));
    }
    let root_n = (n as f64).sqrt();
    let values = (0..r as u64)
        .into_par_iter()
        .map(|i| {
            let path = model.generate(spec, n, &mut derive_stream(master_seed, i))?;
            Ok((path.get(n) - n as f64 * spec.mu()).abs() / root_n)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = crate::summation::sum(&values) / r as f64;
    let std_error = if r > 1 {
        let ss: NeumaierSum = values.iter().map(|v| (v - mean).powi(2)).collect();
        (ss.value() / (r - 1) as f64 / r as f64).sqrt()
    } else {
        f64::NAN
    };
    Ok(L1Estimate {
        mean,
        std_error,
        replications: r,
    })
}

/// A synthetic path built from a Wiener path, with its clipping report.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledPath {
    pub path: SamplePath,
    /// Entries raised to the floor `k mu / 2`.
    pub clipped: usize,
    /// More than 1% of entries were clipped.
    pub clip_warning: bool,
}

impl CoupledPath {
    pub fn clip_fraction(&self) -> f64 {
        self.clipped as f64 / self.path.n() as f64
    }
}

fn integer_stride(w: &GridFunction, n: usize) -> Result<usize> {
    if n == 0 {
        return Err(out_of_range("n", "n >= 1 required"));
    }
    if w.horizon() != n as f64 || w.m() % n != 0 {
        return Err(Error::Grid(format!(
            "coupling needs a path on horizon n = {n} with resolution a multiple of n; got horizon {} and m = {}",
            w.horizon(),
            w.m()
        )));
    }
    Ok(w.m() / n)
}

/// `S_k = k mu + sigma w(k)` for `k = 1..=n`, floored at `k mu / 2`.
pub fn coupled_path(spec: &DistributionSpec, w: &GridFunction, n: usize) -> Result<CoupledPath> {
    let stride = integer_stride(w, n)?;
    let (mu, sigma) = (spec.mu(), spec.sigma());
    let mut clipped = 0;
    let values: Vec<f64> = (1..=n)
        .map(|k| {
            let base = k as f64 * mu;
            let s = base + sigma * w.values()[k * stride];
            if s < 0.5 * base {
                clipped += 1;
                0.5 * base
            } else {
                s
            }
        })
        .collect();
    Ok(CoupledPath {
        path: SamplePath::new(values)?,
        clipped,
        clip_warning: clipped * 100 > n,
    })
}

/// `|sum_{k<=n} ln(S_k/(k mu)) - (sigma/mu) int_0^n w(x)/x dx| / sqrt(n)` for the
/// coupled path built from `w`.
pub fn coupling_discrepancy(spec: &DistributionSpec, w: &GridFunction, n: usize) -> Result<f64> {
    let coupled = coupled_path(spec, w, n)?;
    let lhs = LogRatioPrefix::new(&coupled.path, spec)?.sum_to(n);
    let integral = log_integral_functional(&w.as_piecewise_linear(), n as f64)?;
    Ok((lhs - spec.sigma() / spec.mu() * integral).abs() / (n as f64).sqrt())
}
