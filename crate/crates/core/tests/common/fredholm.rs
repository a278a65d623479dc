//! Fredholm-determinant evaluation of the Tracy–Widom CDFs, used only as a
//! cross-check of the Painlevé tables.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use regedge::quad::{gauss_legendre, integrate};

const AI0: f64 = 0.355_028_053_887_817_2;
const AIP0: f64 = -0.258_819_403_792_806_8;

/// `(Ai, Ai')` from the Taylor recursion of `y'' = x y` at 0 for `x <= 3`,
/// and Macdonald-function integrals beyond.
pub fn airy_pair(x: f64) -> (f64, f64) {
    if x <= 3.0 {
        // c_{n+3} = c_n / ((n + 2)(n + 3)), c_2 = 0
        let mut c = vec![AI0, AIP0, 0.0];
        for n in 0..150 {
            c.push(c[n] / ((n + 2) as f64 * (n + 3) as f64));
        }
        let y = c.iter().rev().fold(0.0, |acc, cn| acc * x + cn);
        let dy = c.iter().enumerate().skip(1).rev().fold(0.0, |acc, (n, cn)| acc * x + n as f64 * cn);
        (y, dy)
    } else {
        let zeta = 2.0 / 3.0 * x.powf(1.5);
        let k = |nu: f64| {
            integrate(|t: f64| (-zeta * t.cosh()).exp() * (nu * t).cosh(), 0.0, 10.0, 1e-300, 1e-14).value
        };
        ((x / 3.0).sqrt() * k(1.0 / 3.0) / PI, -x / (PI * 3f64.sqrt()) * k(2.0 / 3.0))
    }
}

fn half_line_rule(n: usize, scale: f64) -> (Vec<f64>, Vec<f64>) {
    let (u, w) = gauss_legendre(n);
    u.iter()
        .zip(&w)
        .map(|(&u, &w)| {
            // u in (-1, 1) -> v in (0, 1) -> x = scale tan(pi v / 2)
            let v = 0.5 * (u + 1.0);
            let x = scale * (PI * v / 2.0).tan();
            let jac = scale * (PI / 2.0) / (PI * v / 2.0).cos().powi(2);
            (x, 0.5 * w * jac)
        })
        .unzip()
}

fn det_identity_minus(kernel: impl Fn(usize, usize) -> f64, weights: &[f64]) -> f64 {
    let n = weights.len();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        delta - (weights[i] * weights[j]).sqrt() * kernel(i, j)
    });
    m.lu().determinant()
}

/// `F2(s) = det(I - K_Ai)` on `L^2(s, inf)`.
pub fn f2_fredholm(s: f64, nodes: usize) -> f64 {
    let (t, w) = half_line_rule(nodes, 10.0);
    let x: Vec<f64> = t.iter().map(|t| s + t).collect();
    let ai: Vec<(f64, f64)> = x.iter().map(|&x| airy_pair(x)).collect();
    det_identity_minus(
        |i, j| {
            let ((a, ap), (b, bp)) = (ai[i], ai[j]);
            if i == j {
                ap * ap - x[i] * a * a
            } else {
                (a * bp - ap * b) / (x[i] - x[j])
            }
        },
        &w,
    )
}

/// `F1(s) = det(I - B)` on `L^2(0, inf)` with `B(x, y) = Ai(x + y + s)`.
pub fn f1_fredholm(s: f64, nodes: usize) -> f64 {
    let (x, w) = half_line_rule(nodes, 5.0);
    det_identity_minus(|i, j| airy_pair(x[i] + x[j] + s).0, &w)
}
