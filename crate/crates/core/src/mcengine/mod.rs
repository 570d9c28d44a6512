//! Seeded Monte Carlo experiments: streams, configuration, execution,
//! summaries, goodness-of-fit distances and result files.

mod config;
mod engine;
mod ks;
mod report;
mod stream;
mod summary;

pub use config::{ConfigFile, ExperimentConfig, Kind, LilSettings};
pub use engine::{
    replicate, run_clt, run_experiment, run_fclt, with_workers, CovarianceComparison, ExperimentResult, Output,
    ReplicatedOutput, SeedProvenance, WallClock,
};
pub use ks::{ks_distance, normal_cdf};
pub use report::{metadata_json, write_outputs, OutputFiles};
pub use stream::{derive_stream, GaussianSource, SeedStream};
pub use summary::{covariance, quantile_sorted, Summary, QUANTILE_LEVELS};
