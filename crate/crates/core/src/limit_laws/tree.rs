//! Green's function of the `d`-regular tree, exact and on finite truncations.

use num_complex::Complex64;

use super::{m_d, m_sc, LimitLawError};

/// `m_d(z) (-m_sc(z)/sqrt(d-1))^dist`.
pub fn tree_green_closed_form(d: usize, z: Complex64, dist: usize) -> Complex64 {
    let df = d as f64;
    m_d(z, df) * (-m_sc(z) / (df - 1.0).sqrt()).powu(dist as u32)
}

/// Resolvent entry `((A/sqrt(d-1) - z)^{-1})_{root, v}` on the rooted tree
/// truncated at `depth`, for a vertex `v` at distance `dist` from the root.
///
/// The resolvent column of the root is constant on each level, which reduces
/// the problem to a tridiagonal system in the level values `f_0..f_depth`.
pub fn tree_green_oracle(d: usize, depth: usize, z: Complex64, dist: usize) -> Result<Complex64, LimitLawError> {
    if d < 2 {
        return Err(LimitLawError::InvalidArgument(format!("need d >= 2, got {d}")));
    }
    if depth < dist + 3 {
        return Err(LimitLawError::DepthTooSmall { depth, dist });
    }
    if !(z.im > 0.0) {
        return Err(LimitLawError::InvalidArgument(format!("need Im z > 0, got {z}")));
    }
    let r = 1.0 / ((d - 1) as f64).sqrt();
    let n = depth + 1;
    // Row l: lower[l] f_{l-1} + diag[l] f_l + upper[l] f_{l+1} = rhs[l]
    let mut lower = vec![Complex64::new(0.0, 0.0); n];
    let diag = vec![-z; n];
    let mut upper = vec![Complex64::new(0.0, 0.0); n];
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    rhs[0] = Complex64::new(1.0, 0.0);
    upper[0] = Complex64::new(d as f64 * r, 0.0);
    for l in 1..n {
        lower[l] = Complex64::new(r, 0.0);
        if l + 1 < n {
            upper[l] = Complex64::new((d - 1) as f64 * r, 0.0);
        }
    }
    let f = thomas(&lower, &diag, &upper, &rhs);
    Ok(f[dist])
}

fn thomas(lower: &[Complex64], diag: &[Complex64], upper: &[Complex64], rhs: &[Complex64]) -> Vec<Complex64> {
    let n = diag.len();
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    c[0] = upper[0] / diag[0];
    y[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / m;
        y[i] = (rhs[i] - lower[i] * y[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        y[i] = y[i] - c[i] * y[i + 1];
    }
    y
}

/// Explicit rooted `d`-regular tree truncated at `depth` (root has `d`
/// children, every other internal vertex `d - 1`).
#[derive(Debug, Clone)]
pub struct TruncatedTree {
    pub d: usize,
    pub depth: usize,
    /// `parent[v]` for `v > 0`; vertices are numbered level by level.
    pub parent: Vec<usize>,
    pub level: Vec<usize>,
}

impl TruncatedTree {
    pub fn new(d: usize, depth: usize) -> Self {
        let mut parent = vec![usize::MAX];
        let mut level = vec![0];
        let mut frontier = vec![0usize];
        for l in 1..=depth {
            let mut next = Vec::new();
            for &p in &frontier {
                let children = if p == 0 { d } else { d - 1 };
                for _ in 0..children {
                    parent.push(p);
                    level.push(l);
                    next.push(parent.len() - 1);
                }
            }
            frontier = next;
        }
        Self { d, depth, parent, level }
    }

    pub fn num_vertices(&self) -> usize {
        self.parent.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent.iter().enumerate().skip(1).map(|(v, &p)| (p, v))
    }

    /// First vertex on level `l`.
    pub fn first_on_level(&self, l: usize) -> usize {
        self.level.iter().position(|&x| x == l).expect("level exists")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn radial_reduction_matches_dense_tree() {
        for (d, depth) in [(3, 5), (4, 4)] {
            let tree = TruncatedTree::new(d, depth);
            let n = tree.num_vertices();
            let z = c(0.4, 0.6);
            let r = 1.0 / ((d - 1) as f64).sqrt();
            let mut m = DMatrix::from_fn(n, n, |i, j| if i == j { -z } else { c(0.0, 0.0) });
            for (p, v) in tree.edges() {
                m[(p, v)] += r;
                m[(v, p)] += r;
            }
            let mut e0 = nalgebra::DVector::from_element(n, c(0.0, 0.0));
            e0[0] = c(1.0, 0.0);
            let col = m.lu().solve(&e0).unwrap();
            for dist in 0..=depth - 3 {
                let v = tree.first_on_level(dist);
                let radial = tree_green_oracle(d, depth, z, dist).unwrap();
                assert!((col[v] - radial).norm() < 1e-12, "d={d} dist={dist}");
            }
        }
    }

    #[test]
    fn matches_closed_form_at_i() {
        let z = c(0.0, 1.0);
        let g0 = tree_green_oracle(3, 14, z, 0).unwrap();
        assert!((g0 - c(0.0, 0.5189)).norm() < 1e-3);
        for dist in 0..3 {
            let g = tree_green_oracle(3, 14, z, dist).unwrap();
            assert!((g - tree_green_closed_form(3, z, dist)).norm() < 1e-3);
        }
        let g1 = tree_green_oracle(3, 14, z, 1).unwrap();
        let want = -m_d(z, 3.0) * m_sc(z) / 2f64.sqrt();
        assert!((g1 - want).norm() < 1e-3);
        let ratio = tree_green_oracle(3, 14, z, 2).unwrap() / g1;
        assert!((ratio + m_sc(z) / 2f64.sqrt()).norm() < 1e-3);
    }

    #[test]
    fn error_decreases_with_depth() {
        let z = c(0.3, 0.8);
        for dist in 0..3 {
            let errs: Vec<f64> = [8, 11, 14, 17]
                .iter()
                .map(|&depth| (tree_green_oracle(4, depth, z, dist).unwrap() - tree_green_closed_form(4, z, dist)).norm())
                .collect();
            assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
        }
    }

    #[test]
    fn depth_checked() {
        assert_eq!(
            tree_green_oracle(3, 4, c(0.0, 1.0), 2),
            Err(LimitLawError::DepthTooSmall { depth: 4, dist: 2 })
        );
    }
}
