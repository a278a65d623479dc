//! Airy function `Ai` and its derivative.
//!
//! Maclaurin series on `[-6, 5.7]`, asymptotic expansions outside. Near the
//! switch points both representations are accurate to about `1e-8` relative.

use std::f64::consts::PI;

/// `Ai(0)`
const C1: f64 = 0.355_028_053_887_817_2;
/// `-Ai'(0)`
const C2: f64 = 0.258_819_403_792_806_8;

const POSITIVE_SWITCH: f64 = 5.7;
const NEGATIVE_SWITCH: f64 = -6.0;

/// `(Ai(x), Ai'(x))`.
pub fn airy(x: f64) -> (f64, f64) {
    if x > POSITIVE_SWITCH {
        airy_positive_asymptotic(x)
    } else if x < NEGATIVE_SWITCH {
        airy_negative_asymptotic(x)
    } else {
        airy_maclaurin(x)
    }
}

pub fn airy_ai(x: f64) -> f64 {
    airy(x).0
}

fn airy_maclaurin(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    let (mut f, mut g, mut fp, mut gp) = (0.0, 0.0, 0.0, 0.0);
    let (mut a, mut b, mut p, mut r) = (1.0, x, x * x / 2.0, 1.0);
    for k in 0..200 {
        let kf = k as f64;
        f += a;
        g += b;
        gp += r;
        // p holds the x^{3k+2} term of f'
        fp += p;
        p *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 5.0));
        a *= x3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        b *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        r *= x3 / ((3.0 * kf + 1.0) * (3.0 * kf + 3.0));
        let small = |t: f64, s: f64| t.abs() <= 1e-18 * s.abs().max(1e-300);
        if k > 2 && small(a, f) && small(b, g) && small(p, fp) && small(r, gp) {
            break;
        }
    }
    (C1 * f - C2 * g, C1 * fp - C2 * gp)
}

/// Coefficients `u_k`, `v_k` of the asymptotic expansions.
fn asymptotic_coefficients(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0];
    let mut v = vec![1.0];
    for k in 1..n {
        let kf = k as f64;
        let uk = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(uk);
        v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk);
    }
    (u, v)
}

/// Sums `sum_k sign^k c_k / zeta^k` up to the smallest term.
fn optimal_sum(c: &[f64], zeta: f64, alternate: bool) -> f64 {
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut pow = 1.0;
    for (k, &ck) in c.iter().enumerate() {
        let term = ck / pow * if alternate && k % 2 == 1 { -1.0 } else { 1.0 };
        if term.abs() >= prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if prev <= 1e-17 * sum.abs() {
            break;
        }
        pow *= zeta;
    }
    sum
}

fn airy_positive_asymptotic(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let (u, v) = asymptotic_coefficients(40);
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let q = x.powf(0.25);
    (e / q * optimal_sum(&u, zeta, true), -e * q * optimal_sum(&v, zeta, true))
}

fn airy_negative_asymptotic(x: f64) -> (f64, f64) {
    let z = -x;
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let (u, v) = asymptotic_coefficients(40);
    // Even and odd parts with alternating signs: sum (-1)^k c_{2k} / zeta^{2k}
    // and sum (-1)^k c_{2k+1} / zeta^{2k+1}.
    let split = |c: &[f64]| {
        let even: Vec<f64> = c.iter().step_by(2).copied().collect();
        let odd: Vec<f64> = c.iter().skip(1).step_by(2).copied().collect();
        (optimal_sum(&even, zeta * zeta, true), optimal_sum(&odd, zeta * zeta, true) / zeta)
    };
    let (ue, uo) = split(&u);
    let (ve, vo) = split(&v);
    let phase = zeta - PI / 4.0;
    let (s, c) = phase.sin_cos();
    let q = z.powf(0.25);
    let norm = 1.0 / PI.sqrt();
    (norm / q * (c * ue + s * uo), norm * q * (s * ve - c * vo))
}
