//! Lanczos iteration with full reorthogonalization.

use rand::Rng as _;

use super::{SpectralError, SymmetricOperator};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct LanczosOptions {
    /// Convergence threshold on the Ritz residual `|beta_m s_{m,i}|`.
    pub tol: f64,
    pub max_iter: usize,
    /// Ritz values are recomputed every this many steps.
    pub check_every: usize,
    pub seed: u64,
    /// Keep the start vector and all iterates orthogonal to the constant vector.
    pub deflate_ones: bool,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 3000, check_every: 5, seed: 0x5eed, deflate_ones: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanczosResult {
    /// Largest Ritz values, descending.
    pub top: Vec<f64>,
    /// Smallest Ritz values, ascending.
    pub bottom: Vec<f64>,
    pub iterations: usize,
    /// Largest residual among the reported Ritz values.
    pub residual: f64,
    /// The Krylov space became invariant (all distinct eigenvalues found).
    pub exhausted: bool,
}

/// Eigenvalues (ascending) of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off`, together with the last component of each
/// normalized eigenvector.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    assert!(off.len() + 1 == n || (n == 0 && off.is_empty()), "off-diagonal length must be n - 1");
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    // Implicit QL with Wilkinson shifts; only the last row of the eigenvector
    // matrix is tracked since rotations act on columns.
    let mut z = vec![0.0; n];
    if n > 0 {
        z[n - 1] = 1.0;
    }
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    break;
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let t = z[i + 1];
                    z[i + 1] = s * z[i] + c * t;
                    z[i] = c * z[i] - s * t;
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    (idx.iter().map(|&i| d[i]).collect(), idx.iter().map(|&i| z[i]).collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn remove_mean(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
}

/// `k` largest and `k` smallest eigenvalues of `op`, restricted to the
/// orthogonal complement of `1` when `deflate_ones` is set.
///
/// A single start vector cannot resolve multiplicities: each distinct
/// eigenvalue appears once among the Ritz values.
pub fn lanczos_extremes<O: SymmetricOperator + ?Sized>(
    op: &O,
    k: usize,
    opts: &LanczosOptions,
) -> Result<LanczosResult, SpectralError> {
    let n = op.dim();
    if k == 0 {
        return Err(SpectralError::InvalidRequest("need k >= 1".into()));
    }
    let dim = if opts.deflate_ones { n.saturating_sub(1) } else { n };
    if dim == 0 {
        return Err(SpectralError::InvalidRequest("operator has no eigenvalues to compute".into()));
    }
    let mut rng = rng_from_seed(opts.seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    if opts.deflate_ones {
        remove_mean(&mut v);
    }
    let nv = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= nv);

    let max_iter = opts.max_iter.min(dim).max(1);
    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut scale = 0.0f64;
    let mut worst_seen = f64::INFINITY;

    for j in 0..max_iter {
        op.apply(&basis[j], &mut w);
        let alpha = dot(&w, &basis[j]);
        axpy(-alpha, &basis[j], &mut w);
        if j > 0 {
            axpy(-betas[j - 1], &basis[j - 1], &mut w);
        }
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                axpy(-c, q, &mut w);
            }
            if opts.deflate_ones {
                remove_mean(&mut w);
            }
        }
        alphas.push(alpha);
        let beta = dot(&w, &w).sqrt();
        scale = scale.max(alpha.abs()).max(beta).max(f64::MIN_POSITIVE);
        let m = j + 1;
        let exhausted = beta <= 1e-10 * scale || m == dim;
        if exhausted || m == max_iter || (m >= k.min(dim) && m % opts.check_every.max(1) == 0) {
            let (vals, last_comp) = tridiagonal_eigen(&alphas, &betas);
            let kk = k.min(m);
            let res = |i: usize| if exhausted { 0.0 } else { (beta * last_comp[i]).abs() };
            let worst = (0..kk).map(res).chain((m - kk..m).map(res)).fold(0.0, f64::max);
            let top: Vec<f64> = vals.iter().rev().take(kk).copied().collect();
            let bottom: Vec<f64> = vals.iter().take(kk).copied().collect();
            if exhausted || (m >= k && worst <= opts.tol) {
                return Ok(LanczosResult { top, bottom, iterations: m, residual: worst, exhausted });
            }
            worst_seen = worst;
        }
        betas.push(beta);
        basis.push(w.iter().map(|x| x / beta).collect());
    }
    Err(SpectralError::NoConvergence { iterations: max_iter, residual: worst_seen })
}
