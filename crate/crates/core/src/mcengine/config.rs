//! Experiment configuration: the on-disk key-value schema and the validated
//! in-memory form.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prodsum::PathModel;
use crate::variates::{make_distribution, DistributionSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Clt,
    Fclt,
    Lil,
    Extremal,
    Check,
}

impl Kind {
    pub const ALL: [Kind; 5] = [Kind::Clt, Kind::Fclt, Kind::Lil, Kind::Extremal, Kind::Check];

    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Clt => "clt",
            Kind::Fclt => "fclt",
            Kind::Lil => "lil",
            Kind::Extremal => "extremal",
            Kind::Check => "check",
        }
    }

    fn default_m(&self) -> usize {
        match self {
            Kind::Clt | Kind::Fclt | Kind::Check => crate::wiener::DEFAULT_RESOLUTION,
            Kind::Lil => 256,
            Kind::Extremal => 1 << 14,
        }
    }

    fn default_t_grid(&self) -> Vec<f64> {
        match self {
            Kind::Fclt => vec![0.25, 0.5, 0.75, 1.0],
            Kind::Extremal => vec![0.25, 0.5, 1.0],
            _ => vec![1.0],
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL.into_iter().find(|k| k.as_str() == s).ok_or_else(|| {
            let valid: Vec<&str> = Kind::ALL.iter().map(Kind::as_str).collect();
            Error::Config(format!(
                "kind: unknown kind {s:?}; valid kinds are {}",
                valid.join(", ")
            ))
        })
    }
}

/// The configuration file schema. Every key is optional except where a
/// kind needs it; unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "R", alias = "replications", skip_serializing_if = "Option::is_none")]
    pub replications: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub retain_samples: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<PathModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n0: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ridge: Option<f64>,
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Validates and fills defaults. `fallback_seed` is used when no seed is set.
    pub fn resolve(&self, fallback_seed: u64) -> Result<ExperimentConfig> {
        let kind: Kind = self
            .kind
            .as_deref()
            .ok_or_else(|| Error::Config("kind: missing".into()))?
            .parse()?;
        let family = self.family.as_deref().unwrap_or("Exponential");
        let params = self.params.clone().unwrap_or_else(|| vec![1.0]);
        let spec = make_distribution(family, &params).map_err(|e| Error::Config(format!("family/params: {e}")))?;
        let config = ExperimentConfig {
            kind,
            spec,
            n: self.n.unwrap_or(1000),
            replications: self.replications.unwrap_or(1000),
            m: self.m.unwrap_or_else(|| kind.default_m()),
            t_grid: self.t_grid.clone().unwrap_or_else(|| kind.default_t_grid()),
            master_seed: self.seed.unwrap_or(fallback_seed),
            workers_hint: self.workers.unwrap_or(0),
            output_path: self.output.clone(),
            retain_samples: self.retain_samples.unwrap_or(true),
            model: self.generator.unwrap_or_default(),
            lil: LilSettings {
                n0: self.n0.unwrap_or(1000),
                rho: self.rho.unwrap_or(1.2),
            },
            ridge: self.ridge,
        };
        config.validate()?;
        Ok(config)
    }
}

/// Checkpoint schedule for iterated-logarithm runs: `n_j = ceil(n0 rho^j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LilSettings {
    pub n0: usize,
    pub rho: f64,
}

/// A validated, reproducible experiment description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(serialize_with = "serialize_spec")]
    pub spec: DistributionSpec,
    pub n: usize,
    #[serde(rename = "R")]
    pub replications: usize,
    pub m: usize,
    pub t_grid: Vec<f64>,
    pub master_seed: u64,
    /// Worker threads; 0 means one per available core. Never affects results.
    pub workers_hint: usize,
    pub output_path: Option<PathBuf>,
    pub retain_samples: bool,
    pub model: PathModel,
    pub lil: LilSettings,
    /// Ridge for min-norm inversions; `None` selects the scaled default.
    pub ridge: Option<f64>,
}

fn serialize_spec<S: serde::Serializer>(spec: &DistributionSpec, s: S) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Echo {
        family: &'static str,
        params: Vec<f64>,
        mu: f64,
        sigma: f64,
        gamma: f64,
    }
    Echo {
        family: spec.family().name(),
        params: spec.family().params(),
        mu: spec.mu(),
        sigma: spec.sigma(),
        gamma: spec.gamma(),
    }
    .serialize(s)
}

fn config_error(key: &str, message: impl fmt::Display) -> Error {
    Error::Config(format!("{key}: {message}"))
}

impl ExperimentConfig {
    /// Defaults for `kind` with the unit exponential law.
    pub fn new(kind: Kind, master_seed: u64) -> Self {
        ConfigFile {
            kind: Some(kind.as_str().into()),
            ..Default::default()
        }
        .resolve(master_seed)
        .expect("defaults are valid")
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(config_error("n", "n ≥ 1 required"));
        }
        if self.replications < 1 {
            return Err(config_error("R", "R ≥ 1 required"));
        }
        if self.m < 1 {
            return Err(config_error("m", "m ≥ 1 required"));
        }
        if let Some(t) = self.t_grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(config_error("t_grid", format!("times must lie in [0, 1], got {t}")));
        }
        if let Some(r) = self.ridge {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(config_error(
                    "ridge",
                    format!("nonnegative finite ridge required, got {r}"),
                ));
            }
        }
        match self.kind {
            Kind::Fclt | Kind::Extremal => {
                if self.t_grid.is_empty() {
                    return Err(config_error("t_grid", "must be nonempty"));
                }
                if self.t_grid.iter().any(|&t| t <= 0.0) {
                    return Err(config_error("t_grid", "times must be > 0 for this kind"));
                }
                if self.kind == Kind::Extremal && self.m < 2 {
                    return Err(config_error("m", "m ≥ 2 required"));
                }
            }
            Kind::Lil => {
                if self.n < 3 {
                    return Err(config_error("n", "n ≥ 3 required for lil"));
                }
                if self.lil.n0 < 3 {
                    return Err(config_error("n0", "n0 ≥ 3 required"));
                }
                if !(self.lil.rho > 1.0 && self.lil.rho.is_finite()) {
                    return Err(config_error("rho", format!("rho > 1 required, got {}", self.lil.rho)));
                }
            }
            Kind::Clt | Kind::Check => {}
        }
        Ok(())
    }

    /// The configuration in file form, sufficient to re-run the experiment.
    pub fn to_file(&self) -> ConfigFile {
        ConfigFile {
            kind: Some(self.kind.as_str().into()),
            family: Some(self.spec.family().name().into()),
            params: Some(self.spec.family().params()),
            n: Some(self.n),
            replications: Some(self.replications),
            m: Some(self.m),
            t_grid: Some(self.t_grid.clone()),
            seed: Some(self.master_seed),
            workers: Some(self.workers_hint),
            output: self.output_path.clone(),
            retain_samples: Some(self.retain_samples),
            generator: Some(self.model),
            n0: Some(self.lil.n0),
            rho: Some(self.lil.rho),
            ridge: self.ridge,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let file = ConfigFile::from_json(
            r#"{"kind": "clt", "family": "Exponential", "params": [1], "n": 1000, "R": 100, "seed": 42}"#,
        )
        .unwrap();
        let c = file.resolve(7).unwrap();
        assert_eq!(c.kind, Kind::Clt);
        assert_eq!((c.n, c.replications, c.master_seed), (1000, 100, 42));
        assert_eq!(c.t_grid, vec![1.0]);
        assert_eq!(c.model, PathModel::Iid);
        assert!(c.retain_samples);
    }

    #[test]
    fn unknown_kind_lists_valid_kinds() {
        let file = ConfigFile::from_json(r#"{"kind": "cltx"}"#).unwrap();
        let err = file.resolve(0).unwrap_err().to_string();
        assert!(err.contains("clt, fclt, lil, extremal, check"), "{err}");
    }

    #[test]
    fn zero_n_is_rejected() {
        let file = ConfigFile::from_json(r#"{"kind": "clt", "n": 0}"#).unwrap();
        assert!(file.resolve(0).unwrap_err().to_string().contains("n ≥ 1"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ConfigFile::from_json(r#"{"kind": "clt", "bogus": 1}"#).unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
    }

    #[test]
    fn missing_seed_uses_fallback() {
        let file = ConfigFile::from_json(r#"{"kind": "clt"}"#).unwrap();
        assert_eq!(file.resolve(99).unwrap().master_seed, 99);
    }

    #[test]
    fn kind_specific_validation() {
        for (json, needle) in [
            (r#"{"kind": "lil", "n": 2}"#, "n ≥ 3"),
            (r#"{"kind": "lil", "rho": 1.0}"#, "rho > 1"),
            (r#"{"kind": "fclt", "t_grid": [0.0, 0.5]}"#, "> 0"),
            (r#"{"kind": "fclt", "t_grid": [1.5]}"#, "[0, 1]"),
            (
                r#"{"kind": "clt", "family": "Uniform", "params": [2, 1]}"#,
                "family/params",
            ),
        ] {
            let err = ConfigFile::from_json(json).unwrap().resolve(0).unwrap_err().to_string();
            assert!(err.contains(needle), "{json}: {err}");
        }
    }

    #[test]
    fn file_form_round_trips() {
        let file = ConfigFile::from_json(
            r#"{"kind": "fclt", "family": "LogNormal", "params": [0.1, 0.5], "n": 300, "R": 20, "seed": 5, "t_grid": [0.5, 1.0]}"#,
        )
        .unwrap();
        let c = file.resolve(0).unwrap();
        let again = ConfigFile::from_json(&serde_json::to_string(&c.to_file()).unwrap())
            .unwrap()
            .resolve(1)
            .unwrap();
        assert_eq!(c, again);
    }
}
