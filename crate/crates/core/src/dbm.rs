//! Constrained GOE, the interpolation `H(t) = e^{-t/2} H + sqrt(1 - e^{-t}) W`,
//! and Monte Carlo checks of the covariance and integration-by-parts formulas.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::rng::{derive_seed, rng_from_seed, Rng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DbmError {
    #[error("shape mismatch: {0}x{0} versus {1}x{1}")]
    ShapeMismatch(usize, usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Symmetric Gaussian matrix with vanishing row sums.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedGoe {
    pub entries: DMatrix<f64>,
}

impl ConstrainedGoe {
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn max_row_sum(&self) -> f64 {
        self.entries.row_iter().map(|r| r.sum().abs()).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..i).all(|j| self.entries[(i, j)] == self.entries[(j, i)]))
    }
}

/// `E[W_ij W_kl] = (1/N)[(d_ik - 1/N)(d_jl - 1/N) + (d_il - 1/N)(d_jk - 1/N)]`.
pub fn constrained_goe_covariance(n: usize, i: usize, j: usize, k: usize, l: usize) -> f64 {
    let nf = n as f64;
    let p = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 } - 1.0 / nf;
    (p(i, k) * p(j, l) + p(i, l) * p(j, k)) / nf
}

pub fn sample_constrained_goe(n: usize, seed: u64) -> Result<ConstrainedGoe, DbmError> {
    if n < 2 {
        return Err(DbmError::InvalidArgument(format!("need n >= 2, got {n}")));
    }
    Ok(sample_constrained_goe_with(n, &mut rng_from_seed(seed)))
}

/// `P X P` for symmetric `X` with `Var X_ij = (1 + delta_ij)/N`.
pub fn sample_constrained_goe_with(n: usize, rng: &mut Rng) -> ConstrainedGoe {
    let nf = n as f64;
    let off = (1.0 / nf).sqrt();
    let diag = (2.0 / nf).sqrt();
    let mut x = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let g: f64 = StandardNormal.sample(rng);
            let v = g * if i == j { diag } else { off };
            x[(i, j)] = v;
            x[(j, i)] = v;
        }
    }
    let r: Vec<f64> = (0..n).map(|i| x.column(i).sum()).collect();
    let s: f64 = r.iter().sum();
    let mut w = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let v = x[(i, j)] - (r[i] + r[j]) / nf + s / (nf * nf);
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    ConstrainedGoe { entries: w }
}

/// `H(t)` together with its time.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolatedMatrix {
    pub t: f64,
    pub matrix: DMatrix<f64>,
}

/// `e^{-t/2} d / sqrt(d - 1)`, the eigenvalue of `H(t)` on `1`.
pub fn trivial_eigenvalue_at(t: f64, d: usize) -> f64 {
    (-t / 2.0).exp() * d as f64 / ((d - 1) as f64).sqrt()
}

pub fn interpolate(h: &DMatrix<f64>, w: &ConstrainedGoe, t: f64) -> Result<InterpolatedMatrix, DbmError> {
    if h.nrows() != w.n() || h.ncols() != w.n() {
        return Err(DbmError::ShapeMismatch(h.nrows(), w.n()));
    }
    if !(t >= 0.0) {
        return Err(DbmError::InvalidArgument(format!("time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(InterpolatedMatrix { t, matrix: h.clone() });
    }
    let a = (-t / 2.0).exp();
    let b = (-(-t).exp_m1()).sqrt();
    Ok(InterpolatedMatrix { t, matrix: h * a + &w.entries * b })
}

/// Pairwise (cascade) summation.
fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

const CHUNK: usize = 1000;

/// Runs `samples` draws of `W` in fixed chunks (seeded per chunk, so results do
/// not depend on the thread count) and returns, per statistic, the mean and
/// standard error of the per-sample values produced by `stat`.
fn monte_carlo<F>(n: usize, samples: usize, seed: u64, dims: usize, stat: F) -> Vec<(f64, f64)>
where
    F: Fn(&ConstrainedGoe, &mut [f64]) + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<(Vec<f64>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng_from_seed(derive_seed(seed, c as u64));
            let count = CHUNK.min(samples - c * CHUNK);
            let mut sums = vec![Vec::with_capacity(count); dims];
            let mut squares = vec![Vec::with_capacity(count); dims];
            let mut out = vec![0.0; dims];
            for _ in 0..count {
                let w = sample_constrained_goe_with(n, &mut rng);
                stat(&w, &mut out);
                for k in 0..dims {
                    sums[k].push(out[k]);
                    squares[k].push(out[k] * out[k]);
                }
            }
            let s = sums.iter().map(|v| pairwise_sum(v)).collect();
            let q = squares.iter().map(|v| pairwise_sum(v)).collect();
            (s, q)
        })
        .collect();
    let m = samples as f64;
    (0..dims)
        .map(|k| {
            let s: Vec<f64> = partial.iter().map(|p| p.0[k]).collect();
            let q: Vec<f64> = partial.iter().map(|p| p.1[k]).collect();
            let mean = pairwise_sum(&s) / m;
            let var = (pairwise_sum(&q) / m - mean * mean).max(0.0) * m / (m - 1.0);
            (mean, (var / m).sqrt())
        })
        .collect()
}

/// One covariance pattern compared with its exact value.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternCheck {
    pub pattern: &'static str,
    pub indices: [usize; 4],
    pub expected: f64,
    pub mean: f64,
    pub std_error: f64,
}

impl PatternCheck {
    /// `|mean - expected|` in standard errors.
    pub fn z_score(&self) -> f64 {
        (self.mean - self.expected).abs() / self.std_error
    }
}

/// The six index patterns `(ii,ii), (ij,ij), (ij,ji), (ij,ik), (ij,kl), (ii,jj)`
/// with `i, j, k, l = 0, 1, 2, 3`.
pub fn covariance_patterns(n: usize, samples: usize, seed: u64) -> Result<Vec<PatternCheck>, DbmError> {
    if n < 4 || samples < 2 {
        return Err(DbmError::InvalidArgument(format!("need n >= 4 and samples >= 2, got {n}, {samples}")));
    }
    let patterns: [(&'static str, [usize; 4]); 6] = [
        ("ii,ii", [0, 0, 0, 0]),
        ("ij,ij", [0, 1, 0, 1]),
        ("ij,ji", [0, 1, 1, 0]),
        ("ij,ik", [0, 1, 0, 2]),
        ("ij,kl", [0, 1, 2, 3]),
        ("ii,jj", [0, 0, 1, 1]),
    ];
    let stats = monte_carlo(n, samples, seed, patterns.len(), |w, out| {
        for (o, (_, [i, j, k, l])) in out.iter_mut().zip(&patterns) {
            *o = w.entries[(*i, *j)] * w.entries[(*k, *l)];
        }
    });
    Ok(patterns
        .iter()
        .zip(stats)
        .map(|(&(pattern, [i, j, k, l]), (mean, std_error))| PatternCheck {
            pattern,
            indices: [i, j, k, l],
            expected: constrained_goe_covariance(n, i, j, k, l),
            mean,
            std_error,
        })
        .collect())
}

/// Test functions for the integration-by-parts check; all read entry `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IbpFunction {
    Constant,
    /// `W_12`
    Linear,
    /// `(W^2)_12`
    Quadratic,
    /// `(W^3)_12`
    Cubic,
}

/// Nonzero entries of `xi_ij^kl = D_ij + D_kl - D_ik - D_jl`, with
/// `(D_ab)_xy = d_ax d_by + d_ay d_bx`.
fn xi_entries(i: usize, j: usize, k: usize, l: usize) -> Vec<(usize, usize, f64)> {
    let mut out: Vec<(usize, usize, f64)> = Vec::with_capacity(8);
    let mut add = |a: usize, b: usize, s: f64| {
        for (x, y) in [(a, b), (b, a)] {
            match out.iter_mut().find(|e| e.0 == x && e.1 == y) {
                Some(e) => e.2 += s,
                None => out.push((x, y, s)),
            }
        }
    };
    add(i, j, 1.0);
    add(k, l, 1.0);
    add(i, k, -1.0);
    add(j, l, -1.0);
    out.retain(|e| e.2 != 0.0);
    out
}

impl IbpFunction {
    fn value(&self, w: &DMatrix<f64>, w2: &DMatrix<f64>) -> f64 {
        let (a, b) = (0, 1);
        match self {
            IbpFunction::Constant => 1.0,
            IbpFunction::Linear => w[(a, b)],
            IbpFunction::Quadratic => w2[(a, b)],
            IbpFunction::Cubic => (0..w.nrows()).map(|c| w2[(a, c)] * w[(c, b)]).sum(),
        }
    }

    /// Directional derivative along the sparse direction `xi`.
    fn directional(&self, w: &DMatrix<f64>, w2: &DMatrix<f64>, xi: &[(usize, usize, f64)]) -> f64 {
        let (a, b) = (0, 1);
        let mut total = 0.0;
        for &(r, c, v) in xi {
            total += v * match self {
                IbpFunction::Constant => 0.0,
                IbpFunction::Linear => f64::from(u8::from(r == a && c == b)),
                // (xi W + W xi)_ab
                IbpFunction::Quadratic => {
                    (if r == a { w[(c, b)] } else { 0.0 }) + (if c == b { w[(a, r)] } else { 0.0 })
                }
                // (xi W^2 + W xi W + W^2 xi)_ab
                IbpFunction::Cubic => {
                    (if r == a { w2[(c, b)] } else { 0.0 })
                        + w[(a, r)] * w[(c, b)]
                        + (if c == b { w2[(a, r)] } else { 0.0 })
                }
            };
        }
        total
    }
}

/// Both sides of `E[W_ij F(W)] = N^{-3} sum_kl E[d_{xi_ij^kl} F(W)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IbpReport {
    pub lhs: f64,
    pub rhs: f64,
    /// Standard error of the per-sample difference `LHS - RHS`.
    pub std_error: f64,
    pub samples: usize,
}

impl IbpReport {
    /// `|LHS - RHS|` in standard errors (0 when both sides vanish identically).
    pub fn residual(&self) -> f64 {
        let diff = (self.lhs - self.rhs).abs();
        if self.std_error == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / self.std_error
        }
    }
}

/// Monte Carlo estimate of both sides for the pair `(i, j)` from one stream of
/// samples; the derivative side sums over all `k, l` explicitly.
pub fn ibp_check(n: usize, samples: usize, seed: u64, f: IbpFunction, i: usize, j: usize) -> Result<IbpReport, DbmError> {
    if n < 2 || i >= n || j >= n || samples < 2 {
        return Err(DbmError::InvalidArgument(format!("bad IBP request n={n}, i={i}, j={j}, samples={samples}")));
    }
    let directions: Vec<Vec<(usize, usize, f64)>> =
        (0..n).flat_map(|k| (0..n).map(move |l| xi_entries(i, j, k, l))).collect();
    let n3 = (n as f64).powi(3);
    let stats = monte_carlo(n, samples, seed, 3, |w, out| {
        let m = &w.entries;
        let w2 = if matches!(f, IbpFunction::Quadratic | IbpFunction::Cubic) { m * m } else { DMatrix::zeros(0, 0) };
        let lhs = m[(i, j)] * f.value(m, &w2);
        let rhs: f64 = directions.iter().map(|xi| f.directional(m, &w2, xi)).sum::<f64>() / n3;
        out[0] = lhs;
        out[1] = rhs;
        out[2] = lhs - rhs;
    });
    Ok(IbpReport { lhs: stats[0].0, rhs: stats[1].0, std_error: stats[2].1, samples })
}

/// Residual of the quadratic test function `(W^2)_12` at `(i, j) = (1, 2)`,
/// in standard errors.
pub fn ibp_residual(n: usize, samples: usize, seed: u64) -> Result<f64, DbmError> {
    if samples < 10_000 {
        return Err(DbmError::InvalidArgument(format!("need at least 10^4 samples, got {samples}")));
    }
    Ok(ibp_check(n, samples, seed, IbpFunction::Quadratic, 0, 1)?.residual())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sample_regular, SamplerOptions};
    use crate::spectral::{dense_nontrivial_spectrum, normalized_matrix};

    #[test]
    fn row_sums_and_symmetry() {
        for n in [2, 5, 64] {
            let w = sample_constrained_goe(n, 4).unwrap();
            assert!(w.max_row_sum() <= 1e-12 * n as f64);
            assert!(w.is_symmetric());
        }
        assert!(sample_constrained_goe(1, 0).is_err());
        assert_eq!(sample_constrained_goe(6, 9).unwrap(), sample_constrained_goe(6, 9).unwrap());
    }

    #[test]
    fn covariance_formula_values() {
        assert!((constrained_goe_covariance(10, 0, 0, 0, 0) - 0.162).abs() < 1e-15);
        assert!((constrained_goe_covariance(10, 0, 1, 2, 3) - 2e-3).abs() < 1e-15);
    }

    #[test]
    fn xi_matches_dense_definition() {
        let n = 5;
        let delta = |a: usize, b: usize| {
            DMatrix::from_fn(n, n, |x, y| f64::from(u8::from(x == a && y == b)) + f64::from(u8::from(x == b && y == a)))
        };
        for (i, j, k, l) in [(0, 1, 2, 3), (0, 1, 0, 1), (2, 2, 2, 4), (1, 3, 3, 1)] {
            let dense = delta(i, j) + delta(k, l) - delta(i, k) - delta(j, l);
            let mut sparse = DMatrix::zeros(n, n);
            for (r, c, v) in xi_entries(i, j, k, l) {
                sparse[(r, c)] += v;
            }
            assert_eq!(dense, sparse);
        }
    }

    #[test]
    fn direction_sum_is_projected_delta() {
        // sum_kl xi_ij^kl = N^2 P D_ij P, which makes the formula exact
        let n = 6;
        let nf = n as f64;
        for (i, j) in [(0, 1), (2, 2)] {
            let mut total = DMatrix::<f64>::zeros(n, n);
            for k in 0..n {
                for l in 0..n {
                    for (r, c, v) in xi_entries(i, j, k, l) {
                        total[(r, c)] += v;
                    }
                }
            }
            for a in 0..n {
                for b in 0..n {
                    let want = nf * nf * nf * constrained_goe_covariance(n, i, j, a, b);
                    assert!((total[(a, b)] - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn linear_function_rhs_is_exact_covariance() {
        let r = ibp_check(8, 20_000, 3, IbpFunction::Linear, 0, 1).unwrap();
        assert!((r.rhs - constrained_goe_covariance(8, 0, 1, 0, 1)).abs() < 1e-15);
        assert!(r.residual() <= 3.0, "{r:?}");
    }

    #[test]
    fn constant_function() {
        let r = ibp_check(8, 10_000, 5, IbpFunction::Constant, 0, 1).unwrap();
        assert_eq!(r.rhs, 0.0);
        assert!(r.residual() <= 4.0);
    }

    #[test]
    fn quadratic_and_cubic() {
        assert!(ibp_residual(8, 20_000, 7).unwrap() <= 4.0);
        let cubic = ibp_check(8, 20_000, 7, IbpFunction::Cubic, 0, 1).unwrap();
        assert!(cubic.lhs.abs() > 5.0 * cubic.std_error, "cubic case should be nontrivial: {cubic:?}");
        assert!(cubic.residual() <= 4.0, "{cubic:?}");
        assert!(ibp_residual(8, 100, 7).is_err());
    }

    #[test]
    fn interpolation() {
        let g = sample_regular(64, 6, 2, &SamplerOptions::default()).unwrap();
        let h = normalized_matrix(&g).unwrap();
        let w = sample_constrained_goe(64, 3).unwrap();
        assert_eq!(interpolate(&h, &w, 0.0).unwrap().matrix, h);
        let far = interpolate(&h, &w, 50.0).unwrap();
        assert!((far.matrix - &w.entries).amax() <= 1e-10);
        let ht = interpolate(&h, &w, 0.3).unwrap();
        let want = trivial_eigenvalue_at(0.3, 6);
        for i in 0..64 {
            assert!((ht.matrix.row(i).sum() - want).abs() <= 1e-12);
        }
        let top = ht.matrix.clone().symmetric_eigenvalues().max();
        assert!((top - want).abs() <= 1e-8);
        let bad = sample_constrained_goe(10, 1).unwrap();
        assert_eq!(interpolate(&h, &bad, 0.1).unwrap_err(), DbmError::ShapeMismatch(64, 10));
    }

    #[test]
    fn interpolated_spectrum_is_bounded() {
        let g = sample_regular(256, 8, 5, &SamplerOptions::default()).unwrap();
        let h = normalized_matrix(&g).unwrap();
        let w = sample_constrained_goe(256, 6).unwrap();
        let ev = dense_nontrivial_spectrum(&interpolate(&h, &w, 0.5).unwrap().matrix);
        assert!(ev.iter().all(|x| x.abs() <= 3.0));
    }
}
