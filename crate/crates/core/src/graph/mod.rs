//! Simple `d`-regular graphs, switchings, forest sums and samplers.

mod forest;
mod sampler;
mod switching;

use std::fmt::Write as _;

use thiserror::Error;

pub use forest::{forest_leading_constant, forest_sum, forest_sum_closed_form, Forest, MAX_FOREST_VERTICES};
pub use sampler::{
    sample_pairing, sample_regular, AutoSampler, PairingSampler, RegularSampler, SamplerOptions,
    SamplerRegistry, SwitchingSampler, DEFAULT_PAIRING_RETRIES,
};
pub use switching::{apply_switch, is_switchable, mcmc_randomize, SwitchChain, SwitchMove};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("pairing model rejected {attempts} consecutive attempts")]
    RetriesExceeded { attempts: usize },
    #[error("vertex index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("switch move indices must be pairwise distinct: {0:?}")]
    IndicesNotDistinct([usize; 4]),
    #[error("edges {0:?} are not switchable")]
    NotSwitchable(SwitchMove),
    #[error("forest has {vertices} vertices; brute force supports at most {max}")]
    ForestTooLarge { vertices: usize, max: usize },
    #[error("not a forest: {0}")]
    NotAForest(String),
    #[error("malformed edge list: {0}")]
    Parse(String),
    #[error("defect repair did not terminate after {0} switch attempts")]
    RepairFailed(usize),
}

/// Dense symmetric bit matrix for O(1) adjacency queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct AdjBits {
    words_per_row: usize,
    bits: Vec<u64>,
}

impl AdjBits {
    pub(crate) fn new(n: usize) -> Self {
        let words_per_row = n.div_ceil(64).max(1);
        Self { words_per_row, bits: vec![0; words_per_row * n] }
    }

    #[inline]
    pub(crate) fn get(&self, u: usize, v: usize) -> bool {
        (self.bits[u * self.words_per_row + v / 64] >> (v % 64)) & 1 == 1
    }

    #[inline]
    pub(crate) fn set(&mut self, u: usize, v: usize, on: bool) {
        let w = &mut self.bits[u * self.words_per_row + v / 64];
        if on {
            *w |= 1 << (v % 64);
        } else {
            *w &= !(1 << (v % 64));
        }
    }

    #[inline]
    pub(crate) fn set_sym(&mut self, u: usize, v: usize, on: bool) {
        self.set(u, v, on);
        self.set(v, u, on);
    }
}

/// A simple `d`-regular graph on vertices `0..n`.
///
/// Stores sorted neighbor lists plus a bit matrix for constant-time lookups.
/// Construction validates regularity, symmetry and the absence of loops and
/// multi-edges; the type is immutable afterwards.
#[derive(Debug, Clone)]
pub struct RegularGraph {
    n: usize,
    d: usize,
    neighbors: Vec<Vec<u32>>,
    adj: AdjBits,
}

impl PartialEq for RegularGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.d == other.d && self.neighbors == other.neighbors
    }
}

impl Eq for RegularGraph {}

pub(crate) fn check_params(n: usize, d: usize) -> Result<(), GraphError> {
    if n < 4 {
        return Err(GraphError::InvalidParams(format!("n = {n} must be at least 4")));
    }
    if d == 0 || d >= n {
        return Err(GraphError::InvalidParams(format!("degree d = {d} must satisfy 1 <= d < n = {n}")));
    }
    if (n * d) % 2 == 1 {
        return Err(GraphError::InvalidParams(format!("n*d = {} is odd", n * d)));
    }
    Ok(())
}

impl RegularGraph {
    /// Builds a graph from an edge list, validating every invariant.
    pub fn from_edges(n: usize, d: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        check_params(n, d)?;
        let mut adj = AdjBits::new(n);
        let mut neighbors = vec![Vec::with_capacity(d); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::IndexOutOfRange { index: x, n });
                }
            }
            if u == v {
                return Err(GraphError::InvalidParams(format!("self-loop at vertex {u}")));
            }
            if adj.get(u, v) {
                return Err(GraphError::InvalidParams(format!("repeated edge {u}-{v}")));
            }
            adj.set_sym(u, v, true);
            neighbors[u].push(v as u32);
            neighbors[v].push(u as u32);
        }
        for (v, nb) in neighbors.iter_mut().enumerate() {
            if nb.len() != d {
                return Err(GraphError::InvalidParams(format!(
                    "vertex {v} has degree {} instead of {d}",
                    nb.len()
                )));
            }
            nb.sort_unstable();
        }
        Ok(Self { n, d, neighbors, adj })
    }

    /// Internal constructor for edge lists already known to be simple and regular.
    pub(crate) fn from_trusted_edges(n: usize, d: usize, edges: impl Iterator<Item = (u32, u32)>, adj: AdjBits) -> Self {
        let mut neighbors = vec![Vec::with_capacity(d); n];
        for (u, v) in edges {
            neighbors[u as usize].push(v);
            neighbors[v as usize].push(u);
        }
        for nb in neighbors.iter_mut() {
            nb.sort_unstable();
        }
        let g = Self { n, d, neighbors, adj };
        debug_assert!(g.validate().is_ok());
        g
    }

    /// The complete graph `K_n`.
    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::from_edges(n, n.saturating_sub(1), &edges)
    }

    /// The cycle `0 - 1 - ... - (n-1) - 0`.
    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        let edges: Vec<_> = (0..n).map(|u| (u, (u + 1) % n)).collect();
        Self::from_edges(n, 2, &edges)
    }

    /// Circulant graph joining `i` to `i ± 1, …, i ± d/2` (plus the antipode for odd `d`).
    pub fn circulant(n: usize, d: usize) -> Result<Self, GraphError> {
        check_params(n, d)?;
        let mut edges = Vec::with_capacity(n * d / 2);
        for u in 0..n {
            for s in 1..=d / 2 {
                edges.push((u, (u + s) % n));
            }
        }
        if d % 2 == 1 {
            if n % 2 == 1 {
                return Err(GraphError::InvalidParams("odd degree circulant needs even n".into()));
            }
            for u in 0..n / 2 {
                edges.push((u, u + n / 2));
            }
        }
        Self::from_edges(n, d, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn num_edges(&self) -> usize {
        self.n * self.d / 2
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.get(u, v)
    }

    /// `A_uv` as an integer.
    #[inline]
    pub fn a(&self, u: usize, v: usize) -> u64 {
        self.adj.get(u, v) as u64
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[v]
    }

    pub fn degree_vector(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for (u, nb) in self.neighbors.iter().enumerate() {
            for &v in nb {
                if (v as usize) > u {
                    out.push((u, v as usize));
                }
            }
        }
        out
    }

    pub(crate) fn adj_bits(&self) -> &AdjBits {
        &self.adj
    }

    /// Complement graph, which is `(n - 1 - d)`-regular.
    pub fn complement(&self) -> Result<Self, GraphError> {
        let n = self.n;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if !self.has_edge(u, v) {
                    edges.push((u, v));
                }
            }
        }
        Self::from_edges(n, n - 1 - self.d, &edges)
    }

    /// Re-checks every structural invariant.
    pub fn validate(&self) -> Result<(), GraphError> {
        if (self.n * self.d) % 2 == 1 {
            return Err(GraphError::InvalidParams("n*d odd".into()));
        }
        for (u, nb) in self.neighbors.iter().enumerate() {
            if nb.len() != self.d {
                return Err(GraphError::InvalidParams(format!("vertex {u} has degree {}", nb.len())));
            }
            if self.adj.get(u, u) {
                return Err(GraphError::InvalidParams(format!("loop at {u}")));
            }
            for w in nb.windows(2) {
                if w[0] >= w[1] {
                    return Err(GraphError::InvalidParams(format!("neighbor list of {u} not strictly sorted")));
                }
            }
            for &v in nb {
                if !self.adj.get(v as usize, u) || !self.adj.get(u, v as usize) {
                    return Err(GraphError::InvalidParams(format!("asymmetric edge {u}-{v}")));
                }
            }
        }
        Ok(())
    }

    /// Plain-text edge list: a header line `n d`, then one `u v` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::with_capacity(12 * self.num_edges() + 16);
        let _ = writeln!(s, "{} {}", self.n, self.d);
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    pub fn from_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| GraphError::Parse("empty input".into()))?;
        let (n, d) = parse_pair(header)?;
        let edges = lines.map(parse_pair).collect::<Result<Vec<_>, _>>()?;
        Self::from_edges(n, d, &edges)
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize), GraphError> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize, GraphError> {
        it.next()
            .ok_or_else(|| GraphError::Parse(format!("expected two integers in '{line}'")))?
            .parse::<usize>()
            .map_err(|e| GraphError::Parse(format!("'{line}': {e}")))
    };
    let a = next()?;
    let b = next()?;
    Ok((a, b))
}
