//! Normalized adjacency matrix, projected Green's function and extreme eigenvalues.

mod control;
mod eigen;
mod green;
mod lanczos;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::graph::RegularGraph;

pub use control::{control_params, ControlParams, DEFAULT_DOMAIN_CONSTANT};
pub use eigen::{
    dense_nontrivial_spectrum, extreme_eigenvalues, restrict_to_ones_complement, spectrum_csv, DenseSolver,
    EigensolverOptions, EigensolverRegistry, ExtremeEigensolver, LanczosSolver, SpectrumSummary,
};
pub use green::{green_function, stieltjes, ward_residual, GreensFunction, SpectralDecomposition, DENSE_DECOMPOSITION_MAX_N};
pub use lanczos::{lanczos_extremes, tridiagonal_eigen, LanczosOptions, LanczosResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("degree {0} is too small to normalize (need d >= 2)")]
    DegreeTooSmall(usize),
    #[error("spectral parameter needs Im z > 0, got {0}")]
    InvalidSpectralParameter(Complex64),
    #[error("Lanczos did not converge after {iterations} iterations (worst residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

/// `z = E + i eta` with `eta > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParameter {
    z: Complex64,
}

impl SpectralParameter {
    pub fn new(energy: f64, eta: f64) -> Result<Self, SpectralError> {
        Self::from_complex(Complex64::new(energy, eta))
    }

    pub fn from_complex(z: Complex64) -> Result<Self, SpectralError> {
        if z.im > 0.0 && z.re.is_finite() && z.im.is_finite() {
            Ok(Self { z })
        } else {
            Err(SpectralError::InvalidSpectralParameter(z))
        }
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn energy(&self) -> f64 {
        self.z.re
    }

    pub fn eta(&self) -> f64 {
        self.z.im
    }
}

/// `d / sqrt(d - 1)`, the eigenvalue of `H` on the constant vector.
pub fn trivial_eigenvalue(d: usize) -> f64 {
    d as f64 / ((d - 1) as f64).sqrt()
}

/// `H = A / sqrt(d - 1)` as a dense matrix.
pub fn normalized_matrix(g: &RegularGraph) -> Result<DMatrix<f64>, SpectralError> {
    let scale = normalization(g)?;
    let n = g.n();
    let mut h = DMatrix::zeros(n, n);
    for u in 0..n {
        for &v in g.neighbors(u) {
            h[(u, v as usize)] = scale;
        }
    }
    Ok(h)
}

fn normalization(g: &RegularGraph) -> Result<f64, SpectralError> {
    if g.d() < 2 {
        return Err(SpectralError::DegreeTooSmall(g.d()));
    }
    Ok(1.0 / ((g.d() - 1) as f64).sqrt())
}

/// Real symmetric linear operator used by the Lanczos iteration.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Sparse view of `H = A / sqrt(d - 1)`.
pub struct NormalizedAdjacency<'a> {
    graph: &'a RegularGraph,
    scale: f64,
}

impl<'a> NormalizedAdjacency<'a> {
    pub fn new(graph: &'a RegularGraph) -> Result<Self, SpectralError> {
        Ok(Self { graph, scale: normalization(graph)? })
    }
}

impl SymmetricOperator for NormalizedAdjacency<'_> {
    fn dim(&self) -> usize {
        self.graph.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (u, out) in y.iter_mut().enumerate() {
            let s: f64 = self.graph.neighbors(u).iter().map(|&v| x[v as usize]).sum();
            *out = self.scale * s;
        }
    }
}

impl SymmetricOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        // Column-major storage: for a symmetric matrix y_i = <column i, x>.
        for (i, out) in y.iter_mut().enumerate() {
            *out = self.column(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}
