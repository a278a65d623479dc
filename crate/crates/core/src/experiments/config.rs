//! Campaign configuration: plain-text `key=value` files plus overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::ExperimentError;
use crate::graph::{SamplerRegistry, DEFAULT_PAIRING_RETRIES};
use crate::spectral::EigensolverRegistry;

/// `d > n^REGIME_EXPONENT` triggers a warning.
pub const REGIME_EXPONENT: f64 = 0.34;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub d: usize,
    pub num_graphs: usize,
    pub seed: u64,
    /// Switching proposals after the repaired pairing; `None` means `100 n d`.
    pub mcmc_burnin: Option<u64>,
    /// Interpolation time for `interp`.
    pub t: f64,
    pub output_path: Option<PathBuf>,
    /// Worker threads; 0 lets rayon decide.
    pub threads: usize,
    pub sampler: String,
    /// Rejections tolerated by the `pairing` sampler.
    pub pairing_retries: usize,
    pub eigensolver: String,
    /// Rigidity threshold on the 99th percentile of the normalized deviation.
    pub r_max: f64,
    pub ks_threshold: f64,
    /// `|mean lambda_2(t) - E_+(t)|` tolerance for `interp`.
    pub interp_tolerance: f64,
    /// Corrupt one Green's function entry in the identity suite.
    pub fault_injection: bool,
    /// Fill the `wall_ms` column of `samples.csv`.
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 1000,
            d: 10,
            num_graphs: 100,
            seed: 1,
            mcmc_burnin: None,
            t: 0.3,
            output_path: None,
            threads: 0,
            sampler: "auto".into(),
            pairing_retries: DEFAULT_PAIRING_RETRIES,
            eigensolver: "lanczos".into(),
            r_max: 20.0,
            ks_threshold: 0.08,
            interp_tolerance: 0.02,
            fault_injection: false,
            record_timing: false,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ExperimentError> {
    value
        .parse()
        .map_err(|_| ExperimentError::Config(format!("cannot parse {key} = '{value}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ExperimentError> {
    match value.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(ExperimentError::Config(format!("cannot parse {key} = '{value}' as a boolean"))),
    }
}

impl ExperimentConfig {
    /// Sets one key; `graphs` and `out` are accepted as aliases.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ExperimentError> {
        let value = value.trim();
        match key.trim() {
            "n" => self.n = parse(key, value)?,
            "d" => self.d = parse(key, value)?,
            "num_graphs" | "graphs" => self.num_graphs = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "mcmc_burnin" => {
                self.mcmc_burnin = if value.is_empty() || value == "auto" { None } else { Some(parse(key, value)?) }
            }
            "t" => self.t = parse(key, value)?,
            "output_path" | "out" => self.output_path = Some(PathBuf::from(value)),
            "threads" => self.threads = parse(key, value)?,
            "sampler" => self.sampler = value.to_string(),
            "pairing_retries" => self.pairing_retries = parse(key, value)?,
            "eigensolver" => self.eigensolver = value.to_string(),
            "r_max" => self.r_max = parse(key, value)?,
            "ks_threshold" => self.ks_threshold = parse(key, value)?,
            "interp_tolerance" => self.interp_tolerance = parse(key, value)?,
            "fault_injection" => self.fault_injection = parse_bool(key, value)?,
            "record_timing" => self.record_timing = parse_bool(key, value)?,
            other => return Err(ExperimentError::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ExperimentError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ExperimentError::Config(format!("line {}: expected key=value, got '{raw}'", lineno + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, ExperimentError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExperimentError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    /// Checks the invariants and returns warnings (currently the regime check).
    pub fn validate(&self) -> Result<Vec<String>, ExperimentError> {
        let err = |m: String| Err(ExperimentError::Config(m));
        if self.n < 4 {
            return err(format!("n = {} must be at least 4", self.n));
        }
        if self.d < 2 || self.d >= self.n {
            return err(format!("d = {} must satisfy 2 <= d < n = {}", self.d, self.n));
        }
        if (self.n * self.d) % 2 == 1 {
            return err(format!("n d = {} must be even", self.n * self.d));
        }
        if self.pairing_retries == 0 {
            return err("pairing_retries must be at least 1".into());
        }
        if self.num_graphs == 0 {
            return err("num_graphs must be at least 1".into());
        }
        if !(self.t.is_finite() && self.t >= 0.0) {
            return err(format!("t = {} must be finite and nonnegative", self.t));
        }
        for (name, v) in [("r_max", self.r_max), ("ks_threshold", self.ks_threshold), ("interp_tolerance", self.interp_tolerance)] {
            if !(v.is_finite() && v > 0.0) {
                return err(format!("{name} = {v} must be positive"));
            }
        }
        if !SamplerRegistry::builtin().contains(&self.sampler) {
            return err(format!("unknown sampler '{}'", self.sampler));
        }
        if !EigensolverRegistry::builtin().contains(&self.eigensolver) {
            return err(format!("unknown eigensolver '{}'", self.eigensolver));
        }
        let mut warnings = Vec::new();
        let bound = (self.n as f64).powf(REGIME_EXPONENT);
        if self.d as f64 > bound {
            warnings.push(format!(
                "d = {} exceeds n^{REGIME_EXPONENT} = {bound:.2}; outside the regime where Tracy–Widom edge statistics are expected",
                self.d
            ));
        }
        Ok(warnings)
    }

    /// Settings that determine the results. Thread count, output location and
    /// the timing switch are excluded.
    pub fn canonical(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("n".into(), self.n.to_string());
        m.insert("d".into(), self.d.to_string());
        m.insert("num_graphs".into(), self.num_graphs.to_string());
        m.insert("seed".into(), self.seed.to_string());
        m.insert("mcmc_burnin".into(), self.mcmc_burnin.map_or("auto".into(), |b| b.to_string()));
        m.insert("t".into(), format!("{:?}", self.t));
        m.insert("sampler".into(), self.sampler.clone());
        m.insert("pairing_retries".into(), self.pairing_retries.to_string());
        m.insert("eigensolver".into(), self.eigensolver.clone());
        m.insert("r_max".into(), format!("{:?}", self.r_max));
        m.insert("ks_threshold".into(), format!("{:?}", self.ks_threshold));
        m.insert("interp_tolerance".into(), format!("{:?}", self.interp_tolerance));
        m.insert("fault_injection".into(), self.fault_injection.to_string());
        m
    }

    /// SHA-256 (hex) of the canonical `key=value` lines.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.canonical() {
            h.update(format!("{k}={v}\n").as_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}
