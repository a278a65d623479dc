//! Classical eigenvalue locations of the Kesten–McKay law.

use std::f64::consts::{FRAC_PI_2, PI};

use super::LimitLawError;
use crate::quad::integrate;

/// Density in the variable `x = 2 sin(theta)`: `rho_d(x) dx = g(theta) dtheta`.
fn theta_density(theta: f64, d: f64) -> f64 {
    let c = theta.cos();
    let s = theta.sin();
    2.0 * c * c / (PI * (d / (d - 1.0) - 4.0 * s * s / d))
}

fn tail_theta(theta: f64, d: f64) -> f64 {
    if theta >= FRAC_PI_2 {
        return 0.0;
    }
    integrate(|t| theta_density(t, d), theta, FRAC_PI_2, 1e-16, 1e-15).value
}

/// `int_x^2 rho_d(y) dy`.
pub fn upper_tail(x: f64, d: f64) -> f64 {
    let x = x.clamp(-2.0, 2.0);
    tail_theta((x / 2.0).asin(), d)
}

/// `gamma_2 > gamma_3 > ... > gamma_N` with
/// `(k - 3/2)/(N - 1) = int_{gamma_k}^2 rho_d`, the midpoint quantiles of the
/// `N - 1` nontrivial eigenvalues. The levels are symmetric under
/// `k <-> N + 2 - k`, so `gamma_k = -gamma_{N+2-k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalLocations {
    pub n: usize,
    pub d: f64,
    pub gamma: Vec<f64>,
}

impl ClassicalLocations {
    /// `gamma_k` for `2 <= k <= n`.
    pub fn gamma(&self, k: usize) -> f64 {
        self.gamma[k - 2]
    }

    pub fn level(&self, k: usize) -> f64 {
        (k as f64 - 1.5) / (self.n as f64 - 1.0)
    }

    /// Largest `|int_{gamma_k}^2 rho_d - level(k)|`.
    pub fn max_residual(&self) -> f64 {
        (2..=self.n).map(|k| (upper_tail(self.gamma(k), self.d) - self.level(k)).abs()).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,gamma\n");
        for (i, g) in self.gamma.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 2, g));
        }
        out
    }
}

fn solve_level(q: f64, d: f64, guess: f64) -> f64 {
    let (mut lo, mut hi) = (-FRAC_PI_2, FRAC_PI_2);
    let mut theta = guess.clamp(lo, hi);
    for _ in 0..200 {
        let f = tail_theta(theta, d) - q;
        // tail is decreasing in theta
        if f > 0.0 {
            lo = theta;
        } else {
            hi = theta;
        }
        if f.abs() <= 1e-16 || hi - lo <= 1e-15 {
            break;
        }
        let g = theta_density(theta, d);
        let newton = theta + f / g;
        theta = if g > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
    theta
}

/// Classical locations for `n` eigenvalues (the trivial one excluded).
pub fn classical_locations(n: usize, d: f64) -> Result<ClassicalLocations, LimitLawError> {
    if n < 4 {
        return Err(LimitLawError::InvalidArgument(format!("need n >= 4, got {n}")));
    }
    if !(d >= 2.0) {
        return Err(LimitLawError::InvalidArgument(format!("need d >= 2, got {d}")));
    }
    let mut gamma = Vec::with_capacity(n - 1);
    let mut guess = FRAC_PI_2;
    for k in 2..=n {
        let q = (k as f64 - 1.5) / (n as f64 - 1.0);
        let theta = solve_level(q, d, guess);
        guess = theta;
        gamma.push(2.0 * theta.sin());
    }
    Ok(ClassicalLocations { n, d, gamma })
}

/// `C` in `rho_d(x) ~ C sqrt(2 - x)` as `x -> 2`: `d(d-1) / (pi (d-2)^2)`.
pub fn edge_constant(d: f64) -> f64 {
    d * (d - 1.0) / (PI * (d - 2.0).powi(2))
}

/// `(2C/3)^{2/3}`, so that `int_x^2 rho_d ~ (edge_scale (2 - x))^{3/2}`.
pub fn edge_scale(d: f64) -> f64 {
    (2.0 * edge_constant(d) / 3.0).powf(2.0 / 3.0)
}

/// `d/N + N^{-2/3} min(k - 1, N + 1 - k)^{-1/3}`.
pub fn rigidity_envelope(n: usize, d: f64, k: usize) -> Result<f64, LimitLawError> {
    if k < 2 || k > n {
        return Err(LimitLawError::InvalidArgument(format!("index {k} outside 2..={n}")));
    }
    let nf = n as f64;
    let m = (k - 1).min(n + 1 - k) as f64;
    Ok(d / nf + nf.powf(-2.0 / 3.0) * m.powf(-1.0 / 3.0))
}
