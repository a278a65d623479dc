//! Projected resolvent `G(z) = P (H - z)^{-1} P` with `P = I - 1 1^T / N`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{normalized_matrix, trivial_eigenvalue, SpectralError, SpectralParameter};
use crate::graph::RegularGraph;

/// Above this size the Green's function is obtained from a complex LU solve.
pub const DENSE_DECOMPOSITION_MAX_N: usize = 2048;

/// Eigendecomposition of `H`, reusable across many spectral parameters.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    h: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    /// Eigenvectors with their component along `1` removed.
    projected_vectors: DMatrix<f64>,
    nontrivial: Vec<f64>,
}

impl SpectralDecomposition {
    pub fn new(g: &RegularGraph) -> Result<Self, SpectralError> {
        let h = normalized_matrix(g)?;
        Ok(Self::from_matrix(h, trivial_eigenvalue(g.d())))
    }

    /// Decomposes a symmetric matrix `h` that has `1` as an eigenvector.
    pub fn from_matrix(h: DMatrix<f64>, trivial: f64) -> Self {
        let n = h.nrows();
        let eig = SymmetricEigen::new(h.clone());
        let mut vectors = eig.eigenvectors;
        let eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        // The eigenvector carrying the constant direction is dropped from the
        // nontrivial list; within a degenerate trivial eigenspace any copy works.
        let overlap: Vec<f64> = (0..n).map(|k| vectors.column(k).sum().abs()).collect();
        let trivial_idx = (0..n)
            .max_by(|&a, &b| {
                let ka = overlap[a] - (eigenvalues[a] - trivial).abs();
                let kb = overlap[b] - (eigenvalues[b] - trivial).abs();
                ka.total_cmp(&kb)
            })
            .unwrap_or(0);
        let mut nontrivial: Vec<f64> =
            eigenvalues.iter().enumerate().filter(|&(k, _)| k != trivial_idx).map(|(_, &v)| v).collect();
        nontrivial.sort_by(|a, b| b.total_cmp(a));
        for mut col in vectors.column_iter_mut() {
            let mean = col.sum() / n as f64;
            col.add_scalar_mut(-mean);
        }
        Self { h, eigenvalues, projected_vectors: vectors, nontrivial }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn n(&self) -> usize {
        self.h.nrows()
    }

    /// All eigenvalues of `H` in solver order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `lambda_2 >= ... >= lambda_N`.
    pub fn nontrivial(&self) -> &[f64] {
        &self.nontrivial
    }

    pub fn green(&self, z: SpectralParameter) -> GreensFunction {
        let n = self.n();
        let zc = z.z();
        let mut re_scaled = self.projected_vectors.clone();
        let mut im_scaled = self.projected_vectors.clone();
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = (Complex64::new(lam, 0.0) - zc).inv();
            re_scaled.column_mut(k).scale_mut(w.re);
            im_scaled.column_mut(k).scale_mut(w.im);
        }
        let vt = self.projected_vectors.transpose();
        let re = re_scaled * &vt;
        let im = im_scaled * &vt;
        let entries = DMatrix::from_fn(n, n, |i, j| Complex64::new(re[(i, j)], im[(i, j)]));
        GreensFunction { z, entries }
    }

    /// `(1/N) sum_{k >= 2} 1 / (lambda_k - z)`.
    pub fn stieltjes(&self, z: SpectralParameter) -> Complex64 {
        let zc = z.z();
        let s: Complex64 = self.nontrivial.iter().map(|&l| (Complex64::new(l, 0.0) - zc).inv()).sum();
        s / self.n() as f64
    }
}

/// Dense projected Green's function at a fixed spectral parameter.
#[derive(Debug, Clone)]
pub struct GreensFunction {
    z: SpectralParameter,
    entries: DMatrix<Complex64>,
}

impl GreensFunction {
    pub fn z(&self) -> SpectralParameter {
        self.z
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    /// Overwrites one entry; used to check that diagnostics detect corruption.
    pub fn corrupt_entry(&mut self, i: usize, j: usize, delta: Complex64) {
        self.entries[(i, j)] += delta;
    }

    /// Normalized trace `(1/N) Tr G`.
    pub fn stieltjes(&self) -> Complex64 {
        self.entries.trace() / self.n() as f64
    }

    /// `max_i |sum_j G_ij|` and the same over columns.
    pub fn max_line_sum(&self) -> f64 {
        let rows = self.entries.row_iter().map(|r| r.sum().norm()).fold(0.0, f64::max);
        let cols = self.entries.column_iter().map(|c| c.sum().norm()).fold(0.0, f64::max);
        rows.max(cols)
    }

    pub fn symmetry_residual(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)]).norm());
            }
        }
        worst
    }

    /// Max-norm of `G H - z G - P` and `H G - z G - P`.
    pub fn resolvent_residual(&self, h: &DMatrix<f64>) -> f64 {
        let n = self.n();
        let re = self.entries.map(|c| c.re);
        let im = self.entries.map(|c| c.im);
        let z = self.z.z();
        let mut worst = 0.0f64;
        for (gh_re, gh_im) in [(&re * h, &im * h), (h * &re, h * &im)] {
            for i in 0..n {
                for j in 0..n {
                    let gh = Complex64::new(gh_re[(i, j)], gh_im[(i, j)]);
                    let p = if i == j { 1.0 } else { 0.0 } - 1.0 / n as f64;
                    let r = gh - z * self.entries[(i, j)] - p;
                    worst = worst.max(r.norm());
                }
            }
        }
        worst
    }
}

/// Projected Green's function of `H` at `z`.
///
/// Uses the eigendecomposition for `N <= 2048` and a complex LU solve above.
pub fn green_function(g: &RegularGraph, z: SpectralParameter) -> Result<GreensFunction, SpectralError> {
    if g.n() <= DENSE_DECOMPOSITION_MAX_N {
        return Ok(SpectralDecomposition::new(g)?.green(z));
    }
    let h = normalized_matrix(g)?;
    Ok(green_by_solve(&h, z))
}

pub(crate) fn green_by_solve(h: &DMatrix<f64>, z: SpectralParameter) -> GreensFunction {
    let n = h.nrows();
    let zc = z.z();
    let shifted = DMatrix::from_fn(n, n, |i, j| Complex64::new(h[(i, j)], 0.0) - if i == j { zc } else { Complex64::new(0.0, 0.0) });
    let proj = DMatrix::from_fn(n, n, |i, j| Complex64::new(if i == j { 1.0 } else { 0.0 } - 1.0 / n as f64, 0.0));
    // (H - z) X = P and P commutes with H, so P X = X P = G.
    let mut x = shifted.lu().solve(&proj).expect("H - z is invertible for Im z > 0");
    for mut col in x.column_iter_mut() {
        let mean = col.sum() / n as f64;
        col.add_scalar_mut(-mean);
    }
    GreensFunction { z, entries: x }
}

/// Stieltjes transform of the nontrivial spectrum, `(1/N) Tr G(z)`.
pub fn stieltjes(g: &RegularGraph, z: SpectralParameter) -> Result<Complex64, SpectralError> {
    Ok(SpectralDecomposition::new(g)?.stieltjes(z))
}

/// Largest violation of the Ward identity, entrywise and averaged:
/// `(1/N) sum_j |G_ij|^2 = Im G_ii / (N eta)` and
/// `(1/N) sum_ij |G_ij|^2 = Im m / eta` (the latter divided by `N`).
pub fn ward_residual(g: &GreensFunction) -> f64 {
    let n = g.n() as f64;
    let eta = g.z().eta();
    let mut worst = 0.0f64;
    let mut total = 0.0;
    for (i, row) in g.entries().row_iter().enumerate() {
        let s: f64 = row.iter().map(|c| c.norm_sqr()).sum();
        total += s;
        let r = (s / n - g.get(i, i).im / (n * eta)).abs();
        worst = worst.max(r);
    }
    let averaged = (total / (n * n) - g.stieltjes().im / (n * eta)).abs();
    worst.max(averaged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sample_regular, SamplerOptions};

    fn k4_closed_form(i: usize, j: usize, z: Complex64) -> Complex64 {
        let delta = if i == j { 1.0 } else { 0.0 };
        Complex64::new(delta - 0.25, 0.0) / (Complex64::new(-1.0 / 2f64.sqrt(), 0.0) - z)
    }

    #[test]
    fn k4_at_i() {
        let g = RegularGraph::complete(4).unwrap();
        let z = SpectralParameter::new(0.0, 1.0).unwrap();
        let gf = green_function(&g, z).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((gf.get(i, j) - k4_closed_form(i, j, z.z())).norm() < 1e-14);
            }
        }
        assert!(ward_residual(&gf) <= 1e-12);
        let m = stieltjes(&g, z).unwrap();
        let want = 0.75 / (Complex64::new(-1.0 / 2f64.sqrt(), 0.0) - z.z());
        assert!((m - want).norm() < 1e-14);
        assert!((gf.stieltjes() - m).norm() < 1e-14);
    }

    #[test]
    fn identities_on_random_graph() {
        let g = sample_regular(60, 4, 3, &SamplerOptions::default()).unwrap();
        let dec = SpectralDecomposition::new(&g).unwrap();
        for (e, eta) in [(0.3, 0.05), (2.1, 0.01), (-1.7, 1.0)] {
            let z = SpectralParameter::new(e, eta).unwrap();
            let gf = dec.green(z);
            assert!(gf.max_line_sum() <= 1e-10 * 60.0);
            assert!(gf.resolvent_residual(dec.matrix()) <= 1e-9);
            assert!(ward_residual(&gf) <= 1e-10);
            assert!(gf.symmetry_residual() <= 1e-12);
            assert!((gf.stieltjes() - dec.stieltjes(z)).norm() <= 1e-10);
            assert!(dec.stieltjes(z).im > 0.0);
        }
    }

    #[test]
    fn solve_route_matches_decomposition() {
        let g = sample_regular(40, 6, 8, &SamplerOptions::default()).unwrap();
        let dec = SpectralDecomposition::new(&g).unwrap();
        let z = SpectralParameter::new(0.7, 0.2).unwrap();
        let a = dec.green(z);
        let b = green_by_solve(dec.matrix(), z);
        let diff = (a.entries() - b.entries()).map(|c| c.norm()).max();
        assert!(diff < 1e-12, "{diff}");
    }

    #[test]
    fn large_eta_bounds() {
        let g = sample_regular(50, 4, 1, &SamplerOptions::default()).unwrap();
        let z = SpectralParameter::new(0.0, 100.0).unwrap();
        let gf = green_function(&g, z).unwrap();
        let max = gf.entries().map(|c| c.norm()).max();
        assert!(max <= 1.0 / 100.0 + 1e-6);
        // m(100 i) ~ -(N-1)/(N z) = i (N-1)/(100 N)
        let m = stieltjes(&g, z).unwrap();
        let approx = Complex64::new(0.0, 49.0 / (100.0 * 50.0));
        assert!((m - approx).norm() <= 1e-3);
        // real spectrum: m(conj z) = conj m(z)
        let zc = z.z().conj();
        let via_conj: Complex64 = SpectralDecomposition::new(&g)
            .unwrap()
            .nontrivial()
            .iter()
            .map(|&l| (Complex64::new(l, 0.0) - zc).inv())
            .sum::<Complex64>()
            / 50.0;
        assert!((via_conj - m.conj()).norm() < 1e-15);
    }

    #[test]
    fn ward_detects_corruption() {
        let g = RegularGraph::complete(4).unwrap();
        let mut gf = green_function(&g, SpectralParameter::new(0.0, 1.0).unwrap()).unwrap();
        gf.corrupt_entry(0, 1, Complex64::new(1e-3, 0.0));
        assert!(ward_residual(&gf) >= 1e-5);
    }
}
