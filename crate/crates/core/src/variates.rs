//! Positive, finite-variance laws with closed-form moments, i.i.d. sampling
//! and partial sums.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mcengine::{GaussianSource, SeedStream};

/// Supported laws. Every member has support in (0, inf) and finite variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Family {
    Exponential {
        rate: f64,
    },
    /// Uniform on `(low, high)` with `0 <= low < high`.
    Uniform {
        low: f64,
        high: f64,
    },
    /// `exp(location + scale * Z)`, Z standard normal.
    LogNormal {
        location: f64,
        scale: f64,
    },
    /// Pareto type II (Lomax): `P(X > x) = (1 + x/scale)^(-shape)`, x > 0.
    ParetoShifted {
        shape: f64,
        scale: f64,
    },
}

impl Family {
    pub const NAMES: [&'static str; 4] = ["Exponential", "Uniform", "LogNormal", "ParetoShifted"];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Exponential { .. } => "Exponential",
            Family::Uniform { .. } => "Uniform",
            Family::LogNormal { .. } => "LogNormal",
            Family::ParetoShifted { .. } => "ParetoShifted",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            Family::Exponential { rate } => vec![rate],
            Family::Uniform { low, high } => vec![low, high],
            Family::LogNormal { location, scale } => vec![location, scale],
            Family::ParetoShifted { shape, scale } => vec![shape, scale],
        }
    }
}

/// An admissible law together with its exact mean, standard deviation and
/// `gamma = mu / sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionSpec {
    family: Family,
    mu: f64,
    sigma: f64,
    gamma: f64,
}

fn invalid(family: &'static str, constraint: impl Into<String>) -> Error {
    Error::InvalidDistribution {
        family,
        constraint: constraint.into(),
    }
}

fn require_finite(family: &'static str, name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(family, format!("{name} must be finite, got {v}")))
    }
}

fn require_positive(family: &'static str, name: &str, v: f64) -> Result<()> {
    require_finite(family, name, v)?;
    if v > 0.0 {
        Ok(())
    } else {
        Err(invalid(family, format!("{name} > 0 required, got {v}")))
    }
}

impl DistributionSpec {
    /// Validates the parameters and computes the closed-form moments.
    pub fn new(family: Family) -> Result<Self> {
        let (mu, variance) = match family {
            Family::Exponential { rate } => {
                require_positive("Exponential", "rate", rate)?;
                (1.0 / rate, 1.0 / (rate * rate))
            }
            Family::Uniform { low, high } => {
                require_finite("Uniform", "a", low)?;
                require_finite("Uniform", "b", high)?;
                // a = 0 is admissible: draws use an open unit interval, so X > a.
                if !(low >= 0.0 && low < high) {
                    return Err(invalid(
                        "Uniform",
                        format!("0 <= a < b required, got a={low}, b={high}"),
                    ));
                }
                let w = high - low;
                (0.5 * (low + high), w * w / 12.0)
            }
            Family::LogNormal { location, scale } => {
                require_finite("LogNormal", "location", location)?;
                require_positive("LogNormal", "scale", scale)?;
                let s2 = scale * scale;
                let mu = (location + 0.5 * s2).exp();
                (mu, s2.exp_m1() * mu * mu)
            }
            Family::ParetoShifted { shape, scale } => {
                require_finite("ParetoShifted", "shape", shape)?;
                require_positive("ParetoShifted", "scale", scale)?;
                if !(shape > 2.0) {
                    return Err(invalid(
                        "ParetoShifted",
                        format!("infinite variance: shape alpha > 2 required, got {shape}"),
                    ));
                }
                let mu = scale / (shape - 1.0);
                (mu, mu * mu * shape / (shape - 2.0))
            }
        };
        let sigma = variance.sqrt();
        if !(mu.is_finite() && sigma.is_finite() && mu > 0.0 && sigma > 0.0) {
            return Err(invalid(
                family.name(),
                format!("moments not representable (mu={mu}, sigma={sigma})"),
            ));
        }
        Ok(Self {
            family,
            mu,
            sigma,
            gamma: mu / sigma,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// One draw. Inverse-CDF for the exponential, uniform and Pareto laws.
    #[inline]
    pub fn draw(&self, stream: &mut SeedStream) -> f64 {
        match self.family {
            Family::Exponential { rate } => -stream.next_uniform().ln() / rate,
            Family::Uniform { low, high } => low + (high - low) * stream.next_uniform(),
            Family::LogNormal { location, scale } => (location + scale * stream.next_gaussian()).exp(),
            // scale * (u^(-1/shape) - 1), written with expm1 so that u near 1 stays positive
            Family::ParetoShifted { shape, scale } => scale * (-stream.next_uniform().ln() / shape).exp_m1(),
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.family.name(), self.family.params())
    }
}

/// Builds a spec from a family name and its positional parameters.
///
/// `Exponential [rate]`, `Uniform [a, b]`, `LogNormal [location, scale]`,
/// `ParetoShifted [alpha, scale]`. Names are matched case-insensitively.
pub fn make_distribution(family: &str, params: &[f64]) -> Result<DistributionSpec> {
    let arity = |name: &'static str, want: usize| -> Result<()> {
        if params.len() == want {
            Ok(())
        } else {
            Err(invalid(
                name,
                format!("expected {want} parameter(s), got {}", params.len()),
            ))
        }
    };
    let fam = match family.to_ascii_lowercase().as_str() {
        "exponential" => {
            arity("Exponential", 1)?;
            Family::Exponential { rate: params[0] }
        }
        "uniform" => {
            arity("Uniform", 2)?;
            Family::Uniform {
                low: params[0],
                high: params[1],
            }
        }
        "lognormal" => {
            arity("LogNormal", 2)?;
            Family::LogNormal {
                location: params[0],
                scale: params[1],
            }
        }
        "paretoshifted" => {
            arity("ParetoShifted", 2)?;
            Family::ParetoShifted {
                shape: params[0],
                scale: params[1],
            }
        }
        other => {
            return Err(Error::Config(format!(
                "unknown family {other:?}; expected one of {}",
                Family::NAMES.join(", ")
            )))
        }
    };
    DistributionSpec::new(fam)
}

/// `n` i.i.d. draws from `spec`, a deterministic function of the stream state.
pub fn sample_iid(spec: &DistributionSpec, n: usize, stream: &mut SeedStream) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(crate::error::out_of_range("n", "n >= 1 required"));
    }
    Ok((0..n).map(|_| spec.draw(stream)).collect())
}

/// A finite sequence `S_1..S_n` of positive reals.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    values: Vec<f64>,
}

impl SamplePath {
    /// Wraps `values`, rejecting empty input and non-positive entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(crate::error::out_of_range("n", "path must be nonempty"));
        }
        if let Some((i, &v)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::NonPositive { index: i + 1, value: v });
        }
        Ok(Self { values })
    }

    /// The synthetic path `S_k = k mu`.
    pub fn deterministic(spec: &DistributionSpec, n: usize) -> Result<Self> {
        Self::new((1..=n).map(|k| k as f64 * spec.mu()).collect())
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `S_k` for 1-based `k`; `S_0 = 0`.
    pub fn get(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.values[k - 1]
        }
    }

    /// The first `k` entries as a path.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.n() {
            return Err(crate::error::out_of_range(
                "k",
                format!("1 <= k <= {} required, got {k}", self.n()),
            ));
        }
        Ok(Self {
            values: self.values[..k].to_vec(),
        })
    }

    /// Scales every entry by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * c).collect())
    }

    /// CSV with columns `k,S_k`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["k", "S_k"])?;
        for (i, v) in self.values.iter().enumerate() {
            out.write_record([(i + 1).to_string(), v.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `S_k = x_1 + ... + x_k`, rejecting non-positive increments.
///
/// The result is strictly increasing in exact arithmetic; in floating point
/// an increment below half an ulp of the running sum leaves it unchanged.
pub fn partial_sums(x: &[f64]) -> Result<SamplePath> {
    if let Some((i, &v)) = x.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::NonPositive { index: i + 1, value: v });
    }
    let values = x
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    SamplePath::new(values)
}
