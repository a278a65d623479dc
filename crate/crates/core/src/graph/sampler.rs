//! Uniform (or near-uniform) random `d`-regular graphs.
//!
//! * `pairing`: configuration model with rejection of loops and multi-edges.
//!   Exactly uniform on simple graphs, but the acceptance rate decays like
//!   `exp(-(d^2 - 1) / 4)`.
//! * `switching`: configuration model whose defects are removed by random
//!   switchings, followed by a burn-in of the double-edge-swap chain.
//! * `auto`: complements dense requests, uses `pairing` when its acceptance
//!   rate is workable and `switching` otherwise.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::switching::mcmc_randomize_with;
use super::{check_params, AdjBits, GraphError, RegularGraph};
use crate::registry::Registry;
use crate::rng::{rng_from_seed_stream, Rng};

pub const DEFAULT_PAIRING_RETRIES: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerOptions {
    /// Rejections tolerated by the pairing sampler.
    pub max_retries: usize,
    /// Switching proposals after the repaired pairing; `None` means `100 n d`.
    pub burnin: Option<u64>,
    /// `auto` only uses pairing when `d <= pairing_degree_factor * sqrt(n)` ...
    pub pairing_degree_factor: f64,
    /// ... and the predicted acceptance `exp(-(d^2-1)/4)` is at least this.
    pub min_pairing_acceptance: f64,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        Self {
            max_retries: DEFAULT_PAIRING_RETRIES,
            burnin: None,
            pairing_degree_factor: 0.8,
            min_pairing_acceptance: 1e-3,
        }
    }
}

impl SamplerOptions {
    pub fn burnin_steps(&self, n: usize, d: usize) -> u64 {
        self.burnin.unwrap_or(100 * n as u64 * d as u64)
    }
}

pub trait RegularSampler: Send + Sync {
    fn name(&self) -> &'static str;
    fn sample(&self, n: usize, d: usize, seed: u64) -> Result<RegularGraph, GraphError>;
}

pub type SamplerRegistry = Registry<dyn RegularSampler, SamplerOptions>;

impl SamplerRegistry {
    pub fn builtin() -> Self {
        let mut reg = Registry::new("sampler");
        reg.register("auto", |o: &SamplerOptions| Box::new(AutoSampler(o.clone())) as Box<dyn RegularSampler>);
        reg.register("pairing", |o: &SamplerOptions| Box::new(PairingSampler(o.clone())) as Box<dyn RegularSampler>);
        reg.register("switching", |o: &SamplerOptions| {
            Box::new(SwitchingSampler(o.clone())) as Box<dyn RegularSampler>
        });
        reg
    }
}

pub struct PairingSampler(pub SamplerOptions);
pub struct SwitchingSampler(pub SamplerOptions);
pub struct AutoSampler(pub SamplerOptions);

impl RegularSampler for PairingSampler {
    fn name(&self) -> &'static str {
        "pairing"
    }
    fn sample(&self, n: usize, d: usize, seed: u64) -> Result<RegularGraph, GraphError> {
        sample_pairing(n, d, seed, self.0.max_retries)
    }
}

impl RegularSampler for SwitchingSampler {
    fn name(&self) -> &'static str {
        "switching"
    }
    fn sample(&self, n: usize, d: usize, seed: u64) -> Result<RegularGraph, GraphError> {
        check_params(n, d)?;
        let mut rng = rng_from_seed_stream(seed, 0);
        let start = pairing_with_repair(n, d, &mut rng)?;
        let mut chain_rng = rng_from_seed_stream(seed, 1);
        Ok(mcmc_randomize_with(&start, self.0.burnin_steps(n, d), &mut chain_rng))
    }
}

impl RegularSampler for AutoSampler {
    fn name(&self) -> &'static str {
        "auto"
    }
    fn sample(&self, n: usize, d: usize, seed: u64) -> Result<RegularGraph, GraphError> {
        check_params(n, d)?;
        if 2 * d > n - 1 {
            let co = n - 1 - d;
            if co == 0 {
                return RegularGraph::complete(n);
            }
            return self.sample(n, co, seed)?.complement();
        }
        let df = d as f64;
        let acceptance = (-(df * df - 1.0) / 4.0).exp();
        if df <= self.0.pairing_degree_factor * (n as f64).sqrt() && acceptance >= self.0.min_pairing_acceptance {
            PairingSampler(self.0.clone()).sample(n, d, seed)
        } else {
            SwitchingSampler(self.0.clone()).sample(n, d, seed)
        }
    }
}

/// `auto` sampler with the given options.
pub fn sample_regular(n: usize, d: usize, seed: u64, options: &SamplerOptions) -> Result<RegularGraph, GraphError> {
    AutoSampler(options.clone()).sample(n, d, seed)
}

fn shuffled_points(n: usize, d: usize, rng: &mut Rng) -> Vec<u32> {
    let mut points: Vec<u32> = (0..n * d).map(|p| (p / d) as u32).collect();
    points.shuffle(rng);
    points
}

/// Configuration model with rejection; uniform over simple `d`-regular graphs.
pub fn sample_pairing(n: usize, d: usize, seed: u64, max_retries: usize) -> Result<RegularGraph, GraphError> {
    check_params(n, d)?;
    let mut rng = rng_from_seed_stream(seed, 0);
    let mut adj = AdjBits::new(n);
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(n * d / 2);
    for _ in 0..max_retries.max(1) {
        let points = shuffled_points(n, d, &mut rng);
        edges.clear();
        let mut simple = true;
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || adj.get(u as usize, v as usize) {
                simple = false;
                break;
            }
            adj.set_sym(u as usize, v as usize, true);
            edges.push((u, v));
        }
        if simple {
            return Ok(RegularGraph::from_trusted_edges(n, d, edges.into_iter(), adj));
        }
        for &(u, v) in &edges {
            adj.set_sym(u as usize, v as usize, false);
        }
    }
    Err(GraphError::RetriesExceeded { attempts: max_retries.max(1) })
}

fn key(u: u32, v: u32) -> (u32, u32) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// One configuration-model pairing whose loops and multi-edges are removed by
/// switching each defective pair with a uniformly random partner edge.
pub(crate) fn pairing_with_repair(n: usize, d: usize, rng: &mut Rng) -> Result<RegularGraph, GraphError> {
    let points = shuffled_points(n, d, rng);
    let mut edges: Vec<(u32, u32)> = points.chunks_exact(2).map(|p| key(p[0], p[1])).collect();
    let mut mult: HashMap<(u32, u32), u32> = HashMap::with_capacity(edges.len());
    for &e in &edges {
        *mult.entry(e).or_insert(0) += 1;
    }
    let defective = |e: (u32, u32), mult: &HashMap<(u32, u32), u32>| e.0 == e.1 || mult[&e] > 1;
    let mut pending: Vec<usize> = (0..edges.len()).filter(|&i| defective(edges[i], &mult)).collect();
    let max_attempts = 1000 * edges.len().max(10);
    let mut attempts = 0;
    while let Some(b) = pending.pop() {
        if !defective(edges[b], &mult) {
            continue;
        }
        loop {
            attempts += 1;
            if attempts > max_attempts {
                return Err(GraphError::RepairFailed(max_attempts));
            }
            let e = rng.random_range(0..edges.len());
            if e == b {
                continue;
            }
            let (u, v) = edges[b];
            let (mut x, mut y) = edges[e];
            if rng.random::<bool>() {
                std::mem::swap(&mut x, &mut y);
            }
            let (ux, vy) = (key(u, x), key(v, y));
            if u == x || v == y || ux == vy || mult.contains_key(&ux) || mult.contains_key(&vy) {
                continue;
            }
            for old in [edges[b], edges[e]] {
                let c = mult.get_mut(&old).expect("tracked edge");
                *c -= 1;
                if *c == 0 {
                    mult.remove(&old);
                }
            }
            mult.insert(ux, 1);
            mult.insert(vy, 1);
            edges[b] = ux;
            edges[e] = vy;
            break;
        }
    }
    let mut adj = AdjBits::new(n);
    for &(u, v) in &edges {
        adj.set_sym(u as usize, v as usize, true);
    }
    Ok(RegularGraph::from_trusted_edges(n, d, edges.into_iter(), adj))
}
