//! Nontrivial spectrum of `H`: Lanczos extremes and dense full spectra.

use nalgebra::DMatrix;

use super::lanczos::{lanczos_extremes, LanczosOptions};
use super::{normalized_matrix, trivial_eigenvalue, NormalizedAdjacency, SpectralError, SymmetricOperator};
use crate::graph::RegularGraph;
use crate::registry::Registry;

/// Eigenvalues of `H` on the complement of `1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSummary {
    /// `lambda_1 = d / sqrt(d - 1)` (or its analogue for an interpolated matrix).
    pub trivial: f64,
    /// All of `lambda_2 >= ... >= lambda_N` when a dense solver was used.
    pub lambda: Option<Vec<f64>>,
    /// `lambda_2, lambda_3, ...` descending.
    pub top: Vec<f64>,
    /// `lambda_N, lambda_{N-1}, ...` ascending.
    pub bottom: Vec<f64>,
    pub iterations: usize,
}

impl SpectrumSummary {
    fn from_full(trivial: f64, lambda: Vec<f64>, k: usize) -> Self {
        let top = lambda.iter().take(k).copied().collect();
        let bottom = lambda.iter().rev().take(k).copied().collect();
        Self { trivial, lambda: Some(lambda), top, bottom, iterations: 0 }
    }

    pub fn lambda_2(&self) -> f64 {
        self.top[0]
    }

    pub fn lambda_n(&self) -> f64 {
        self.bottom[0]
    }
}

/// Computes extreme nontrivial eigenvalues of graphs or of dense matrices
/// that have `1` as an eigenvector.
pub trait ExtremeEigensolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve_graph(&self, g: &RegularGraph, k: usize) -> Result<SpectrumSummary, SpectralError>;
    fn solve_matrix(&self, h: &DMatrix<f64>, trivial: f64, k: usize) -> Result<SpectrumSummary, SpectralError>;
}

pub type EigensolverOptions = LanczosOptions;
pub type EigensolverRegistry = Registry<dyn ExtremeEigensolver, EigensolverOptions>;

impl EigensolverRegistry {
    pub fn builtin() -> Self {
        let mut reg = Registry::new("eigensolver");
        reg.register("lanczos", |o: &EigensolverOptions| {
            Box::new(LanczosSolver(o.clone())) as Box<dyn ExtremeEigensolver>
        });
        reg.register("dense", |_: &EigensolverOptions| Box::new(DenseSolver) as Box<dyn ExtremeEigensolver>);
        reg
    }
}

pub struct LanczosSolver(pub LanczosOptions);
pub struct DenseSolver;

fn lanczos_summary<O: SymmetricOperator + ?Sized>(
    op: &O,
    trivial: f64,
    k: usize,
    opts: &LanczosOptions,
) -> Result<SpectrumSummary, SpectralError> {
    let opts = LanczosOptions { deflate_ones: true, ..opts.clone() };
    let r = lanczos_extremes(op, k, &opts)?;
    Ok(SpectrumSummary { trivial, lambda: None, top: r.top, bottom: r.bottom, iterations: r.iterations })
}

impl ExtremeEigensolver for LanczosSolver {
    fn name(&self) -> &'static str {
        "lanczos"
    }

    fn solve_graph(&self, g: &RegularGraph, k: usize) -> Result<SpectrumSummary, SpectralError> {
        let op = NormalizedAdjacency::new(g)?;
        lanczos_summary(&op, trivial_eigenvalue(g.d()), k, &self.0)
    }

    fn solve_matrix(&self, h: &DMatrix<f64>, trivial: f64, k: usize) -> Result<SpectrumSummary, SpectralError> {
        lanczos_summary(h, trivial, k, &self.0)
    }
}

impl ExtremeEigensolver for DenseSolver {
    fn name(&self) -> &'static str {
        "dense"
    }

    fn solve_graph(&self, g: &RegularGraph, k: usize) -> Result<SpectrumSummary, SpectralError> {
        let h = normalized_matrix(g)?;
        self.solve_matrix(&h, trivial_eigenvalue(g.d()), k)
    }

    fn solve_matrix(&self, h: &DMatrix<f64>, trivial: f64, k: usize) -> Result<SpectrumSummary, SpectralError> {
        if k == 0 {
            return Err(SpectralError::InvalidRequest("need k >= 1".into()));
        }
        Ok(SpectrumSummary::from_full(trivial, dense_nontrivial_spectrum(h), k))
    }
}

/// Top-`k` and bottom-`k` nontrivial eigenvalues of `H` by Lanczos.
pub fn extreme_eigenvalues(g: &RegularGraph, k: usize) -> Result<SpectrumSummary, SpectralError> {
    LanczosSolver(LanczosOptions::default()).solve_graph(g, k)
}

/// Matrix of `h` in an orthonormal basis of the complement of `1`.
///
/// A Householder reflection maps `1/sqrt(N)` to `e_1`; when `h 1` is parallel
/// to `1` the reflected matrix is block diagonal and the trailing block is
/// returned.
pub fn restrict_to_ones_complement(h: &DMatrix<f64>) -> DMatrix<f64> {
    let n = h.nrows();
    let u = 1.0 / (n as f64).sqrt();
    let mut v = nalgebra::DVector::from_element(n, u);
    v[0] -= 1.0;
    let c = 2.0 / v.norm_squared();
    let w = h * &v;
    let vw = v.dot(&w);
    // Q H Q with Q = I - c v v^T
    DMatrix::from_fn(n - 1, n - 1, |i, j| {
        let (i, j) = (i + 1, j + 1);
        h[(i, j)] - c * (w[i] * v[j] + v[i] * w[j]) + c * c * vw * v[i] * v[j]
    })
}

/// `lambda_2 >= ... >= lambda_N` of a symmetric matrix with eigenvector `1`.
pub fn dense_nontrivial_spectrum(h: &DMatrix<f64>) -> Vec<f64> {
    let mut vals: Vec<f64> = restrict_to_ones_complement(h).symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

/// CSV `k,lambda`, 1-indexed, starting with the trivial eigenvalue.
pub fn spectrum_csv(s: &SpectrumSummary) -> Result<String, SpectralError> {
    let lambda = s
        .lambda
        .as_ref()
        .ok_or_else(|| SpectralError::InvalidRequest("spectrum dump needs the full spectrum".into()))?;
    let mut out = String::from("k,lambda\n");
    out.push_str(&format!("1,{}\n", s.trivial));
    for (i, l) in lambda.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 2, l));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sample_regular, SamplerOptions};

    #[test]
    fn complete_graph_spectrum() {
        let g = RegularGraph::complete(5).unwrap();
        let want = -1.0 / 3f64.sqrt();
        let s = extreme_eigenvalues(&g, 1).unwrap();
        assert!((s.lambda_2() - want).abs() < 1e-12);
        let dense = DenseSolver.solve_graph(&g, 2).unwrap();
        assert_eq!(dense.lambda.as_ref().unwrap().len(), 4);
        for l in dense.lambda.unwrap() {
            assert!((l - want).abs() < 1e-12);
        }
    }

    #[test]
    fn six_cycle() {
        let g = RegularGraph::cycle(6).unwrap();
        let s = extreme_eigenvalues(&g, 1).unwrap();
        assert!((s.lambda_2() - 1.0).abs() < 1e-12);
        assert!((s.lambda_n() + 2.0).abs() < 1e-12);
        let d = DenseSolver.solve_graph(&g, 1).unwrap();
        let want = [1.0, 1.0, -1.0, -1.0, -2.0];
        for (a, b) in d.lambda.unwrap().iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn lanczos_matches_dense_on_random_graph() {
        let g = sample_regular(512, 8, 21, &SamplerOptions::default()).unwrap();
        let l = extreme_eigenvalues(&g, 3).unwrap();
        let d = DenseSolver.solve_graph(&g, 3).unwrap();
        for i in 0..3 {
            assert!((l.top[i] - d.top[i]).abs() < 1e-7, "{:?} {:?}", l.top, d.top);
            assert!((l.bottom[i] - d.bottom[i]).abs() < 1e-7);
        }
        assert!((l.lambda_2() - l.trivial).abs() > 0.1);
    }

    #[test]
    fn registry_and_csv() {
        let reg = EigensolverRegistry::builtin();
        assert_eq!(reg.names(), vec!["lanczos", "dense"]);
        let g = RegularGraph::complete(4).unwrap();
        let s = reg.build("dense", &EigensolverOptions::default()).unwrap().solve_graph(&g, 1).unwrap();
        let csv = spectrum_csv(&s).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,lambda");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("1,2.12"));
        assert!(spectrum_csv(&extreme_eigenvalues(&g, 1).unwrap()).is_err());
    }
}
