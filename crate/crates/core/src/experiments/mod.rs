//! Seeded, parallel Monte Carlo campaigns and the identity regression suite.
//!
//! Graph `idx` of a campaign always uses the seed `derive_seed(seed, idx)`,
//! and records are merged in index order, so results do not depend on the
//! number of worker threads.

mod campaigns;
mod config;
pub mod identities;
mod report;
pub mod stats;

use thiserror::Error;

pub use campaigns::{
    run_edge_fluctuation, run_identity_suite, run_interpolation_smoke, run_ramanujan_fraction, run_rigidity, Campaign,
    CampaignRegistry, EdgeFluctuation, IdentitySuite, InterpolationSmoke, RamanujanFraction, Rigidity,
    HISTOGRAM_RANGE, IDENTITY_DBM_SAMPLES, RIGIDITY_MAX_N,
};
pub use config::{ExperimentConfig, REGIME_EXPONENT};
pub use report::{Aggregate, GraphRecord, HistogramBin, IdentityCheck, Interval, Provenance, RunReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME_ERROR: i32 = 1;
pub const EXIT_IDENTITY_FAILURE: i32 = 2;
pub const EXIT_CONFIG_ERROR: i32 = 3;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error(transparent)]
    Spectral(#[from] crate::spectral::SpectralError),
    #[error(transparent)]
    LimitLaw(#[from] crate::limit_laws::LimitLawError),
    #[error(transparent)]
    FreeConv(#[from] crate::free_conv::FreeConvError),
    #[error(transparent)]
    Dbm(#[from] crate::dbm::DbmError),
    #[error(transparent)]
    TracyWidom(#[from] crate::tracy_widom::TwError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl ExperimentError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => EXIT_CONFIG_ERROR,
            _ => EXIT_RUNTIME_ERROR,
        }
    }
}

/// `0`, or `2` if any identity check in the report failed.
pub fn exit_code(report: &RunReport) -> i32 {
    if report.identities_passed() {
        EXIT_OK
    } else {
        EXIT_IDENTITY_FAILURE
    }
}
