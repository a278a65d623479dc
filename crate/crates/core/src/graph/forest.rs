//! Forests and brute-force embedding sums `sum_i prod_{e} A_{i_e i'_e}`.

use super::{GraphError, RegularGraph};

pub const MAX_FOREST_VERTICES: usize = 5;

/// A finite simple acyclic graph on abstract labels `0..num_vertices`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Forest {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Forest {
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let mut parent: Vec<usize> = (0..num_vertices).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(a, b) in &edges {
            if a >= num_vertices || b >= num_vertices {
                return Err(GraphError::NotAForest(format!("edge {a}-{b} uses an unknown label")));
            }
            if a == b {
                return Err(GraphError::NotAForest(format!("self-loop at {a}")));
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return Err(GraphError::NotAForest(format!("edge {a}-{b} closes a cycle")));
            }
            parent[ra] = rb;
        }
        Ok(Self { num_vertices, edges })
    }

    pub fn edge() -> Self {
        Self::path(1)
    }

    /// Path with `len` edges.
    pub fn path(len: usize) -> Self {
        Self::new(len + 1, (0..len).map(|i| (i, i + 1)).collect()).expect("path is a forest")
    }

    /// Star with `leaves` leaves around label 0.
    pub fn star(leaves: usize) -> Self {
        Self::new(leaves + 1, (1..=leaves).map(|i| (0, i)).collect()).expect("star is a forest")
    }

    /// Adds `count` isolated labels.
    pub fn with_singletons(mut self, count: usize) -> Self {
        self.num_vertices += count;
        self
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Number of connected components, singletons included.
    pub fn theta(&self) -> usize {
        self.num_vertices - self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }
}

/// Sum over all assignments of graph vertices to forest labels of the
/// product of adjacency indicators along forest edges.
///
/// With `distinct` the labels must map to pairwise distinct vertices.
pub fn forest_sum(g: &RegularGraph, f: &Forest, distinct: bool) -> Result<u128, GraphError> {
    if f.num_vertices() > MAX_FOREST_VERTICES {
        return Err(GraphError::ForestTooLarge { vertices: f.num_vertices(), max: MAX_FOREST_VERTICES });
    }
    // For each label, the earlier labels it must be adjacent to.
    let back: Vec<Vec<usize>> = (0..f.num_vertices())
        .map(|v| {
            f.edges()
                .iter()
                .filter_map(|&(a, b)| match (a, b) {
                    (a, b) if a == v && b < v => Some(b),
                    (a, b) if b == v && a < v => Some(a),
                    _ => None,
                })
                .collect()
        })
        .collect();
    let mut assignment = vec![0usize; f.num_vertices()];
    Ok(enumerate(g, &back, distinct, 0, &mut assignment))
}

fn enumerate(g: &RegularGraph, back: &[Vec<usize>], distinct: bool, depth: usize, assignment: &mut [usize]) -> u128 {
    if depth == back.len() {
        return 1;
    }
    let mut total = 0;
    'vertex: for x in 0..g.n() {
        if distinct && assignment[..depth].contains(&x) {
            continue;
        }
        for &b in &back[depth] {
            if !g.has_edge(assignment[b], x) {
                continue 'vertex;
            }
        }
        assignment[depth] = x;
        total += enumerate(g, back, distinct, depth + 1, assignment);
    }
    total
}

/// `N^theta * d^|E|`, the exact value of the unrestricted forest sum.
pub fn forest_sum_closed_form(n: usize, d: usize, f: &Forest) -> u128 {
    (n as u128).pow(f.theta() as u32) * (d as u128).pow(f.edges().len() as u32)
}

/// Leading constant `c_T` of the distinct-vertex sum normalized by `N^theta d^|E|`.
pub fn forest_leading_constant(f: &Forest, d: usize) -> f64 {
    let d = d as f64;
    let mut num = 1.0;
    for v in 0..f.num_vertices() {
        let deg = f.degree(v);
        for r in 1..deg {
            num *= d - r as f64;
        }
    }
    let exponent = f.edges().len() as i32 - f.theta() as i32;
    num / d.powi(exponent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::sample_regular;
    use crate::graph::SamplerOptions;

    #[test]
    fn forest_validation() {
        assert!(Forest::new(3, vec![(0, 1), (1, 2), (2, 0)]).is_err());
        assert!(Forest::new(2, vec![(0, 0)]).is_err());
        assert!(Forest::new(2, vec![(0, 5)]).is_err());
        let f = Forest::edge().with_singletons(1);
        assert_eq!(f.theta(), 2);
        assert_eq!(Forest::star(3).theta(), 1);
    }

    #[test]
    fn too_large() {
        let g = RegularGraph::cycle(8).unwrap();
        assert!(matches!(
            forest_sum(&g, &Forest::path(5), false),
            Err(GraphError::ForestTooLarge { vertices: 6, max: 5 })
        ));
    }

    #[test]
    fn path_sums_on_n8_d3() {
        let g = sample_regular(8, 3, 5, &SamplerOptions::default()).unwrap();
        let path = Forest::path(2);
        assert_eq!(forest_sum(&g, &path, false).unwrap(), 72);
        assert_eq!(forest_sum(&g, &path, true).unwrap(), 48);
        assert_eq!(forest_sum(&g, &Forest::edge(), false).unwrap(), 24);
        assert_eq!(forest_sum_closed_form(8, 3, &path), 72);
    }

    #[test]
    fn leading_constant_is_exact_for_paths() {
        // distinct path-2 sum is exactly N d (d-1)
        let d = 4;
        assert!((forest_leading_constant(&Forest::path(2), d) - 0.75).abs() < 1e-15);
        assert!((forest_leading_constant(&Forest::edge(), d) - 1.0).abs() < 1e-15);
        // star with 3 leaves: (d-1)(d-2)/d^2
        assert!((forest_leading_constant(&Forest::star(3), d) - 6.0 / 16.0).abs() < 1e-15);
    }
}
