//! Result files. Column layouts are fixed per kind:
//!
//! | kind     | file           | columns                                   |
//! |----------|----------------|-------------------------------------------|
//! | clt      | `clt.csv`      | `replication,value`                       |
//! | fclt     | `fclt.csv`     | `replication,t,value`                     |
//! | lil      | `lil.csv`      | `n,value,running_max`                     |
//! | extremal | `extremal.csv` | `t,m,value,closed_form,gap`               |
//! | check    | `check.csv`    | `check,value,target,tolerance,passed`     |
//!
//! Replicated kinds also write `summary.csv`, lil writes the Strassen-scaled
//! path to `scaled_path.csv`, and every run writes `metadata.json`. All CSV
//! bytes are a pure function of the configuration; only the metadata carries
//! wall-clock time.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use super::config::Kind;
use super::engine::{ExperimentResult, Output, ReplicatedOutput};
use super::summary::QUANTILE_LEVELS;
use crate::error::Result;

/// Paths written by [`write_outputs`].
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFiles {
    pub primary: PathBuf,
    pub summary: Option<PathBuf>,
    pub extra: Option<PathBuf>,
    pub metadata: PathBuf,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

fn replicated_csv(kind: Kind, out: &ReplicatedOutput) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if kind == Kind::Clt {
        w.write_record(["replication", "value"])?;
        for (r, v) in out.samples.first().into_iter().flatten().enumerate() {
            w.write_record([r.to_string(), v.to_string()])?;
        }
    } else {
        w.write_record(["replication", "t", "value"])?;
        let reps = out.samples.first().map_or(0, Vec::len);
        for r in 0..reps {
            for (i, t) in out.t_grid.iter().enumerate() {
                w.write_record([r.to_string(), t.to_string(), out.samples[i][r].to_string()])?;
            }
        }
    }
    Ok(w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?)
}

fn summary_csv(out: &ReplicatedOutput) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = ["t", "count", "mean", "variance", "target_variance", "skewness"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(
        QUANTILE_LEVELS
            .iter()
            .map(|p| format!("q{:02}", (p * 100.0).round() as u32)),
    );
    header.push("ks_distance".into());
    w.write_record(&header)?;
    for (i, s) in out.summaries.iter().enumerate() {
        let mut row = vec![
            out.t_grid[i].to_string(),
            s.count.to_string(),
            s.mean.to_string(),
            opt(s.variance),
            out.target_variance[i].to_string(),
            opt(s.skewness),
        ];
        row.extend(s.quantiles.iter().map(|(_, q)| q.to_string()));
        row.push(out.ks_distance[i].to_string());
        w.write_record(&row)?;
    }
    Ok(w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?)
}

impl ExperimentResult {
    /// Bytes of the kind's main CSV file.
    pub fn primary_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.output {
            Output::Replicated(out) => return replicated_csv(self.config.kind, out),
            Output::Lil(report) => {
                w.write_record(["n", "value", "running_max"])?;
                for p in &report.trajectory {
                    w.write_record([p.n.to_string(), p.value.to_string(), p.running_max.to_string()])?;
                }
            }
            Output::Extremal { rows } => {
                w.write_record(["t", "m", "value", "closed_form", "gap"])?;
                for r in rows {
                    w.write_record([
                        r.t.to_string(),
                        r.m.to_string(),
                        r.value.to_string(),
                        r.closed_form.to_string(),
                        r.gap.to_string(),
                    ])?;
                }
            }
            Output::Check { outcomes } => {
                w.write_record(["check", "value", "target", "tolerance", "passed"])?;
                for c in outcomes {
                    w.write_record([
                        c.name.to_string(),
                        c.value.to_string(),
                        c.target.to_string(),
                        c.tolerance.to_string(),
                        c.passed.to_string(),
                    ])?;
                }
            }
        }
        Ok(w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?)
    }

    /// Bytes of `summary.csv` for replicated kinds.
    pub fn summary_csv(&self) -> Result<Option<Vec<u8>>> {
        match &self.output {
            Output::Replicated(out) => Ok(Some(summary_csv(out)?)),
            _ => Ok(None),
        }
    }
}

/// The metadata sidecar: a re-runnable config, the resolved config, seed
/// provenance, wall clock and the headline results.
pub fn metadata_json(result: &ExperimentResult) -> Result<String> {
    let doc = json!({
        "config": result.config.to_file(),
        "resolved": result.config,
        "provenance": result.provenance,
        "wall_clock": result.wall_clock,
        "results": result.output,
    });
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// Writes the result files into `dir`, creating it if needed.
pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> Result<OutputFiles> {
    fs::create_dir_all(dir)?;
    let kind = result.config.kind.as_str();
    let primary = dir.join(format!("{kind}.csv"));
    fs::write(&primary, result.primary_csv()?)?;
    let summary = match result.summary_csv()? {
        Some(bytes) => {
            let p = dir.join("summary.csv");
            fs::write(&p, bytes)?;
            Some(p)
        }
        None => None,
    };
    let extra = match &result.output {
        Output::Lil(report) => {
            let p = dir.join("scaled_path.csv");
            report.scaled_path.write_csv(fs::File::create(&p)?)?;
            Some(p)
        }
        _ => None,
    };
    let metadata = dir.join("metadata.json");
    fs::write(&metadata, metadata_json(result)?)?;
    Ok(OutputFiles {
        primary,
        summary,
        extra,
        metadata,
    })
}
