//! Run reports and their file formats.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ExperimentError;

/// One sampled graph. Failed graphs keep their slot with `error` set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub idx: usize,
    pub seed: u64,
    pub lambda2: Option<f64>,
    #[serde(rename = "lambdaN")]
    pub lambda_n: Option<f64>,
    pub ramanujan: Option<bool>,
    pub wall_ms: f64,
    /// Campaign-specific per-graph values.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl GraphRecord {
    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Outcome of one deterministic or statistical check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub block: String,
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl IdentityCheck {
    /// Passes when `residual <= tolerance` (NaN fails).
    pub fn new(block: &str, name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            block: block.into(),
            name: name.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Aggregate {
    /// Records that entered the aggregate.
    pub count: usize,
    pub failed: usize,
    /// Fraction of Ramanujan graphs among `count`.
    pub fraction: Option<f64>,
    /// Wilson score interval at 95%.
    pub ci95: Option<Interval>,
    /// KS distance of `N^{2/3}(lambda_2 - 2)` to TW1 (edge campaigns).
    pub ks: Option<f64>,
    pub metrics: BTreeMap<String, f64>,
    /// Campaign threshold verdict, where the campaign has one.
    pub passed: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    /// SHA-256 of the canonical configuration.
    pub config_hash: String,
    pub config: BTreeMap<String, String>,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub campaign: String,
    pub provenance: Provenance,
    pub records: Vec<GraphRecord>,
    pub aggregate: Aggregate,
    pub identities: Vec<IdentityCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram: Option<Vec<HistogramBin>>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
    pub total_ms: f64,
}

impl RunReport {
    pub fn identities_passed(&self) -> bool {
        self.identities.iter().all(|c| c.passed)
    }

    /// Copy with every timing field zeroed.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.total_ms = 0.0;
        for rec in &mut r.records {
            rec.wall_ms = 0.0;
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `idx,seed,lambda2,lambdaN,ramanujan,wall_ms`; `wall_ms` is left empty
    /// unless `with_timing`, so reruns are byte-identical.
    pub fn samples_csv(&self, with_timing: bool) -> String {
        let mut out = String::from("idx,seed,lambda2,lambdaN,ramanujan,wall_ms\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
        for r in &self.records {
            let flag = r.ramanujan.map(|b| if b { "1" } else { "0" }).unwrap_or("");
            let wall = if with_timing { format!("{:.3}", r.wall_ms) } else { String::new() };
            let _ = writeln!(out, "{},{},{},{},{},{}", r.idx, r.seed, opt(r.lambda2), opt(r.lambda_n), flag, wall);
        }
        out
    }

    /// `bin_left,bin_right,count`
    pub fn histogram_csv(&self) -> Option<String> {
        self.histogram.as_ref().map(|bins| {
            let mut out = String::from("bin_left,bin_right,count\n");
            for b in bins {
                let _ = writeln!(out, "{:?},{:?},{}", b.left, b.right, b.count);
            }
            out
        })
    }

    /// Writes `report.json`, `samples.csv` and, if present, `histogram.csv`.
    pub fn write_to(&self, dir: &Path, with_timing: bool) -> Result<(), ExperimentError> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json())?;
        std::fs::write(dir.join("samples.csv"), self.samples_csv(with_timing))?;
        if let Some(h) = self.histogram_csv() {
            std::fs::write(dir.join("histogram.csv"), h)?;
        }
        Ok(())
    }
}
