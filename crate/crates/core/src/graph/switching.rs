//! Simple switchings and the double-edge-swap Markov chain.

use rand::Rng as _;

use super::{AdjBits, GraphError, RegularGraph};
use crate::rng::{rng_from_seed, Rng};

/// Switching of the edges `ij` and `kl` into `ik` and `jl`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SwitchMove {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
}

impl SwitchMove {
    pub fn new(i: usize, j: usize, k: usize, l: usize) -> Result<Self, GraphError> {
        let idx = [i, j, k, l];
        for a in 0..4 {
            for b in a + 1..4 {
                if idx[a] == idx[b] {
                    return Err(GraphError::IndicesNotDistinct(idx));
                }
            }
        }
        Ok(Self { i, j, k, l })
    }

    /// The move that undoes `self`: switches `ik, jl` back into `ij, kl`.
    pub fn inverse(&self) -> Self {
        Self { i: self.i, j: self.k, k: self.j, l: self.l }
    }

    fn check_range(&self, n: usize) -> Result<(), GraphError> {
        for index in [self.i, self.j, self.k, self.l] {
            if index >= n {
                return Err(GraphError::IndexOutOfRange { index, n });
            }
        }
        Ok(())
    }
}

/// `A_ij A_kl (1 - A_ik)(1 - A_jl) == 1`.
pub fn is_switchable(g: &RegularGraph, m: &SwitchMove) -> Result<bool, GraphError> {
    m.check_range(g.n())?;
    let chi = g.a(m.i, m.j) * g.a(m.k, m.l) * (1 - g.a(m.i, m.k)) * (1 - g.a(m.j, m.l));
    Ok(chi == 1)
}

/// Removes `ij, kl` and inserts `ik, jl`.
pub fn apply_switch(g: &RegularGraph, m: &SwitchMove) -> Result<RegularGraph, GraphError> {
    if !is_switchable(g, m)? {
        return Err(GraphError::NotSwitchable(*m));
    }
    let mut adj = g.adj_bits().clone();
    adj.set_sym(m.i, m.j, false);
    adj.set_sym(m.k, m.l, false);
    adj.set_sym(m.i, m.k, true);
    adj.set_sym(m.j, m.l, true);
    let edges = g
        .edges()
        .into_iter()
        .filter(|&(u, v)| adj.get(u, v))
        .chain([(m.i, m.k), (m.j, m.l)])
        .map(|(u, v)| (u as u32, v as u32))
        .collect::<Vec<_>>();
    Ok(RegularGraph::from_trusted_edges(g.n(), g.d(), edges.into_iter(), adj))
}

/// Working state of the switching chain.
///
/// Owns a mutable copy of the edge list and the adjacency bits. Each
/// [`step`](Self::step) draws two uniformly random edges with uniformly random
/// orientations and switches them when the result is again simple.
#[derive(Debug, Clone)]
pub struct SwitchChain {
    n: usize,
    d: usize,
    edges: Vec<(u32, u32)>,
    adj: AdjBits,
    accepted: u64,
    proposed: u64,
}

impl SwitchChain {
    pub fn new(g: &RegularGraph) -> Self {
        let edges = g.edges().into_iter().map(|(u, v)| (u as u32, v as u32)).collect();
        Self { n: g.n(), d: g.d(), edges, adj: g.adj_bits().clone(), accepted: 0, proposed: 0 }
    }

    /// One proposal; returns whether it was accepted.
    #[inline]
    pub fn step(&mut self, rng: &mut Rng) -> bool {
        let m = self.edges.len();
        let e1 = rng.random_range(0..m);
        let e2 = rng.random_range(0..m);
        let flips: u32 = rng.random();
        self.proposed += 1;
        if e1 == e2 {
            return false;
        }
        let (mut i, mut j) = self.edges[e1];
        if flips & 1 == 1 {
            std::mem::swap(&mut i, &mut j);
        }
        let (mut k, mut l) = self.edges[e2];
        if flips & 2 == 2 {
            std::mem::swap(&mut k, &mut l);
        }
        let (iu, ju, ku, lu) = (i as usize, j as usize, k as usize, l as usize);
        // i != j and k != l always; edges are distinct so {i,j} != {k,l}.
        if iu == ku || ju == lu || self.adj.get(iu, ku) || self.adj.get(ju, lu) {
            return false;
        }
        self.adj.set_sym(iu, ju, false);
        self.adj.set_sym(ku, lu, false);
        self.adj.set_sym(iu, ku, true);
        self.adj.set_sym(ju, lu, true);
        self.edges[e1] = (i, k);
        self.edges[e2] = (j, l);
        self.accepted += 1;
        true
    }

    pub fn run(&mut self, steps: u64, rng: &mut Rng) {
        for _ in 0..steps {
            self.step(rng);
        }
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    pub fn proposed(&self) -> u64 {
        self.proposed
    }

    /// Full audit of the working state; `O(n^2 / 64 + n d)`.
    pub fn check_invariants(&self) -> Result<(), GraphError> {
        let mut deg = vec![0usize; self.n];
        for &(u, v) in &self.edges {
            if u == v || !self.adj.get(u as usize, v as usize) || !self.adj.get(v as usize, u as usize) {
                return Err(GraphError::InvalidParams(format!("edge {u}-{v} inconsistent")));
            }
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        if let Some(v) = deg.iter().position(|&x| x != self.d) {
            return Err(GraphError::InvalidParams(format!("vertex {v} has degree {}", deg[v])));
        }
        let bit_count: usize = (0..self.n).map(|u| (0..self.n).filter(|&v| self.adj.get(u, v)).count()).sum();
        if bit_count != self.n * self.d {
            return Err(GraphError::InvalidParams("adjacency bits out of sync (multi-edge)".into()));
        }
        Ok(())
    }

    pub fn to_graph(&self) -> RegularGraph {
        RegularGraph::from_trusted_edges(self.n, self.d, self.edges.iter().copied(), self.adj.clone())
    }

    pub fn into_graph(self) -> RegularGraph {
        RegularGraph::from_trusted_edges(self.n, self.d, self.edges.into_iter(), self.adj)
    }
}

/// Runs `steps` switching proposals from `g` and returns the final state.
pub fn mcmc_randomize(g: &RegularGraph, steps: u64, seed: u64) -> RegularGraph {
    let mut rng = rng_from_seed(seed);
    mcmc_randomize_with(g, steps, &mut rng)
}

pub(crate) fn mcmc_randomize_with(g: &RegularGraph, steps: u64, rng: &mut Rng) -> RegularGraph {
    if steps == 0 {
        return g.clone();
    }
    let mut chain = SwitchChain::new(g);
    chain.run(steps, rng);
    chain.into_graph()
}
