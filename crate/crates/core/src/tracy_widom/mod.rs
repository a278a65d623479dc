//! Tracy–Widom distributions `F1` and `F2` from the Hastings–McLeod solution of
//! Painlevé II.
//!
//! The table integrates the augmented state `(q, q', I, J, K)` backward from
//! `s = 8`, where
//!
//! - `I(s) = int_s^inf q^2`,
//! - `J(s) = int_s^inf (x - s) q^2`,
//! - `K(s) = int_s^inf q`,
//!
//! so that `F2 = exp(-J)` and `F1 = exp(-(J + K) / 2)`. The derivatives
//! `F2' = I F2` and `F1' = (I + q) F1 / 2` are exact and feed a cubic Hermite
//! interpolant.

mod airy;

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::quad::integrate;

pub use airy::{airy, airy_ai};

/// Left end of the stored grid.
pub const GRID_LEFT: f64 = -10.0;
/// Start of the backward integration and right end of the grid.
pub const GRID_RIGHT: f64 = 8.0;
pub const GRID_STEP: f64 = 0.01;
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// `|q|` above this is treated as departure from the bounded solution.
const BLOWUP_THRESHOLD: f64 = 1e3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwError {
    #[error("Painlevé II integration left the Hastings–McLeod solution near s = {s} (q = {q})")]
    OdeBlowup { s: f64, q: f64 },
    #[error("probability {0} outside [1e-6, 1 - 1e-8]")]
    OutOfRange(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum TwOrder {
    /// GOE
    One,
    /// GUE
    Two,
}

impl TryFrom<u8> for TwOrder {
    type Error = TwError;

    fn try_from(v: u8) -> Result<Self, TwError> {
        match v {
            1 => Ok(TwOrder::One),
            2 => Ok(TwOrder::Two),
            _ => Err(TwError::InvalidArgument(format!("Tracy–Widom order must be 1 or 2, got {v}"))),
        }
    }
}

impl TwOrder {
    pub fn as_u8(self) -> u8 {
        match self {
            TwOrder::One => 1,
            TwOrder::Two => 2,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TwOptions {
    /// Local error tolerance of the Dormand–Prince integrator.
    pub tol: f64,
    /// Retry once at `tol / 10` if the integration blows up.
    pub retry: bool,
}

impl Default for TwOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOLERANCE, retry: true }
    }
}

/// Tabulated CDF on `[-10, 8]` with step `0.01`.
#[derive(Debug, Clone)]
pub struct TwTable {
    pub order: TwOrder,
    pub grid: Vec<f64>,
    /// Hastings–McLeod `q(s)`.
    pub q: Vec<f64>,
    pub cdf: Vec<f64>,
    /// Exact `F'(s)` from the ODE state.
    pub cdf_prime: Vec<f64>,
    /// Interpolation slopes after the monotonicity limiter.
    slopes: Vec<f64>,
    pub tol: f64,
}

type State = [f64; 5];

fn painleve_rhs(s: f64, y: &State) -> State {
    let (q, qp, i) = (y[0], y[1], y[2]);
    [qp, s * q + 2.0 * q * q * q, -q * q, -i, -q]
}

/// Left of this point `q` comes from its asymptotic series: backward
/// integration amplifies errors like `exp((2 sqrt 2 / 3) |s|^(3/2))`.
pub const ASYMPTOTIC_SWITCH: f64 = -7.0;

/// `sqrt(-s/2) sum_n a_n s^(-3n)`
const LEFT_SERIES: [f64; 6] = [1.0, 0.125, -0.5703125, 10.4072265625, -424.5690002441406, 30692.611476898193];

/// Hastings–McLeod `(q, q')` from the expansion at `-inf`, for `s <= -6`.
pub fn hastings_mcleod_left(s: f64) -> (f64, f64) {
    let root = (-s / 2.0).sqrt();
    let t = s.powi(-3);
    let (mut sum, mut dsum, mut pow) = (0.0, 0.0, 1.0);
    for (n, a) in LEFT_SERIES.iter().enumerate() {
        sum += a * pow;
        // d/ds s^(-3n) = -3n s^(-3n-1)
        dsum += -3.0 * n as f64 * a * pow / s;
        pow *= t;
    }
    // d/ds sqrt(-s/2) = sqrt(-s/2) / (2s)
    (root * sum, root * (sum / (2.0 * s) + dsum))
}

/// Integrals only, with `q` from the left expansion.
fn tail_rhs(s: f64, y: &State) -> State {
    let q = hastings_mcleod_left(s).0;
    [0.0, 0.0, -q * q, -y[2], -q]
}

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for (o, v) in out.iter_mut().zip(k.iter()) {
            *o += h * c * v;
        }
    }
    out
}

/// One Dormand–Prince 5(4) step; returns the 5th-order solution and the error estimate.
fn dp45_step<F: Fn(f64, &State) -> State>(rhs: &F, s: f64, y: &State, h: f64) -> (State, State) {
    let k1 = rhs(s, y);
    let k2 = rhs(s + h / 5.0, &axpy(y, h, &[(1.0 / 5.0, &k1)]));
    let k3 = rhs(s + 3.0 * h / 10.0, &axpy(y, h, &[(3.0 / 40.0, &k1), (9.0 / 40.0, &k2)]));
    let k4 = rhs(
        s + 4.0 * h / 5.0,
        &axpy(y, h, &[(44.0 / 45.0, &k1), (-56.0 / 15.0, &k2), (32.0 / 9.0, &k3)]),
    );
    let k5 = rhs(
        s + 8.0 * h / 9.0,
        &axpy(
            y,
            h,
            &[(19372.0 / 6561.0, &k1), (-25360.0 / 2187.0, &k2), (64448.0 / 6561.0, &k3), (-212.0 / 729.0, &k4)],
        ),
    );
    let k6 = rhs(
        s + h,
        &axpy(
            y,
            h,
            &[
                (9017.0 / 3168.0, &k1),
                (-355.0 / 33.0, &k2),
                (46732.0 / 5247.0, &k3),
                (49.0 / 176.0, &k4),
                (-5103.0 / 18656.0, &k5),
            ],
        ),
    );
    let y5 = axpy(
        y,
        h,
        &[(35.0 / 384.0, &k1), (500.0 / 1113.0, &k3), (125.0 / 192.0, &k4), (-2187.0 / 6784.0, &k5), (11.0 / 84.0, &k6)],
    );
    let k7 = rhs(s + h, &y5);
    let e = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let ks = [&k1, &k2, &k3, &k4, &k5, &k6, &k7];
    let mut err = [0.0; 5];
    for (c, k) in e.iter().zip(ks) {
        for (o, v) in err.iter_mut().zip(k.iter()) {
            *o += h * c * v;
        }
    }
    (y5, err)
}

/// Integrates from `s0` to `s1` adaptively, updating the step-size hint `h`.
fn advance<F: Fn(f64, &State) -> State>(
    rhs: &F,
    s0: f64,
    s1: f64,
    y: &mut State,
    h: &mut f64,
    tol: f64,
) -> Result<(), TwError> {
    let dir = (s1 - s0).signum();
    let mut s = s0;
    let mut steps = 0usize;
    while (s1 - s) * dir > 0.0 {
        steps += 1;
        if steps > 100_000 {
            return Err(TwError::OdeBlowup { s, q: y[0] });
        }
        let remaining = s1 - s;
        let mut step = dir * h.abs();
        let last = step.abs() >= remaining.abs();
        if last {
            step = remaining;
        }
        let (y_new, err) = dp45_step(rhs, s, y, step);
        let mut norm: f64 = 0.0;
        for k in 0..5 {
            let scale = tol * y[k].abs().max(y_new[k].abs()).max(1e-300);
            norm = norm.max(err[k].abs() / scale);
        }
        if !norm.is_finite() {
            *h *= 0.1;
            if h.abs() < 1e-14 {
                return Err(TwError::OdeBlowup { s, q: y[0] });
            }
            continue;
        }
        let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
        if norm <= 1.0 {
            s = if last { s1 } else { s + step };
            *y = y_new;
            if !last || factor < 1.0 {
                *h = step.abs() * factor;
            }
            if !y[0].is_finite() || y[0].abs() > BLOWUP_THRESHOLD {
                return Err(TwError::OdeBlowup { s, q: y[0] });
            }
        } else {
            *h = step.abs() * factor;
            if *h < 1e-14 {
                return Err(TwError::OdeBlowup { s, q: y[0] });
            }
        }
    }
    Ok(())
}

/// Tail integrals of `Ai` at `s`: `(int Ai^2, int (x - s) Ai^2, int Ai)` over `[s, inf)`.
fn airy_tails(s: f64) -> (f64, f64, f64) {
    let (a, ap) = airy(s);
    let i = ap * ap - s * a * a;
    let j = (2.0 * s * s * a * a - 2.0 * s * ap * ap - a * ap) / 3.0;
    let k = integrate(airy_ai, s, s + 40.0, 1e-300, 1e-14).value;
    (i, j, k)
}

pub fn build_table(order: TwOrder) -> Result<TwTable, TwError> {
    build_table_with(order, TwOptions::default())
}

pub fn build_table_with(order: TwOrder, opts: TwOptions) -> Result<TwTable, TwError> {
    if !(opts.tol > 0.0 && opts.tol < 1e-3) {
        return Err(TwError::InvalidArgument(format!("tolerance {} outside (0, 1e-3)", opts.tol)));
    }
    match integrate_table(order, opts.tol) {
        Err(TwError::OdeBlowup { .. }) if opts.retry => integrate_table(order, opts.tol / 10.0),
        other => other,
    }
}

fn integrate_table(order: TwOrder, tol: f64) -> Result<TwTable, TwError> {
    let n = ((GRID_RIGHT - GRID_LEFT) / GRID_STEP).round() as usize + 1;
    let grid: Vec<f64> = (0..n).map(|i| GRID_LEFT + i as f64 * GRID_STEP).collect();
    let (a, ap) = airy(GRID_RIGHT);
    let (i0, j0, k0) = airy_tails(GRID_RIGHT);
    let mut y: State = [a, ap, i0, j0, k0];
    let mut states = vec![[0.0; 5]; n];
    states[n - 1] = y;
    let mut h = GRID_STEP;
    for idx in (0..n - 1).rev() {
        if grid[idx] < ASYMPTOTIC_SWITCH - 1e-9 {
            advance(&tail_rhs, grid[idx + 1], grid[idx], &mut y, &mut h, tol)?;
            let (q, qp) = hastings_mcleod_left(grid[idx]);
            y[0] = q;
            y[1] = qp;
        } else {
            advance(&painleve_rhs, grid[idx + 1], grid[idx], &mut y, &mut h, tol)?;
        }
        states[idx] = y;
    }
    let q: Vec<f64> = states.iter().map(|st| st[0]).collect();
    let (cdf, cdf_prime): (Vec<f64>, Vec<f64>) = states
        .iter()
        .map(|st| {
            let (q, i, j, k) = (st[0], st[2], st[3], st[4]);
            match order {
                TwOrder::Two => {
                    let f = (-j).exp();
                    (f, i * f)
                }
                TwOrder::One => {
                    let f = (-(j + k) / 2.0).exp();
                    (f, (i + q) * f / 2.0)
                }
            }
        })
        .unzip();
    let slopes = limit_slopes(&cdf, &cdf_prime, GRID_STEP);
    Ok(TwTable { order, grid, q, cdf, cdf_prime, slopes, tol })
}

/// Fritsch–Carlson limiter applied to given derivatives.
fn limit_slopes(f: &[f64], fp: &[f64], h: f64) -> Vec<f64> {
    let mut m = fp.to_vec();
    for i in 0..f.len() - 1 {
        let delta = (f[i + 1] - f[i]) / h;
        if delta <= 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        m[i] = m[i].max(0.0);
        m[i + 1] = m[i + 1].max(0.0);
        let (alpha, beta) = (m[i] / delta, m[i + 1] / delta);
        let r = alpha * alpha + beta * beta;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            m[i] = tau * alpha * delta;
            m[i + 1] = tau * beta * delta;
        }
    }
    m
}

impl TwTable {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// `F(s)` by monotone cubic Hermite interpolation, constant outside the grid.
    pub fn cdf(&self, s: f64) -> f64 {
        let n = self.grid.len();
        if s.is_nan() {
            return f64::NAN;
        }
        if s <= self.grid[0] {
            return self.cdf[0].clamp(0.0, 1.0);
        }
        if s >= self.grid[n - 1] {
            return self.cdf[n - 1].clamp(0.0, 1.0);
        }
        let i = (((s - GRID_LEFT) / GRID_STEP).floor() as usize).min(n - 2);
        let h = self.grid[i + 1] - self.grid[i];
        let t = (s - self.grid[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let v = h00 * self.cdf[i] + h10 * h * self.slopes[i] + h01 * self.cdf[i + 1] + h11 * h * self.slopes[i + 1];
        v.clamp(0.0, 1.0)
    }

    /// `q(s)` by linear interpolation.
    pub fn q_at(&self, s: f64) -> f64 {
        let n = self.grid.len();
        let x = ((s - GRID_LEFT) / GRID_STEP).clamp(0.0, (n - 1) as f64);
        let i = (x.floor() as usize).min(n - 2);
        let t = x - i as f64;
        self.q[i] * (1.0 - t) + self.q[i + 1] * t
    }

    /// Mean and variance from Simpson's rule on `s F'(s)` and `s^2 F'(s)`.
    pub fn moments(&self) -> (f64, f64) {
        let n = self.grid.len();
        let simpson = |g: &dyn Fn(usize) -> f64| {
            let mut acc = g(0) + g(n - 1);
            for i in 1..n - 1 {
                acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i);
            }
            acc * GRID_STEP / 3.0
        };
        let m1 = simpson(&|i| self.grid[i] * self.cdf_prime[i]);
        let m2 = simpson(&|i| self.grid[i] * self.grid[i] * self.cdf_prime[i]);
        (m1, m2 - m1 * m1)
    }

    /// `s,q,cdf` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,q,cdf\n");
        for i in 0..self.grid.len() {
            let _ = writeln!(out, "{:.2},{:.17e},{:.17e}", self.grid[i], self.q[i], self.cdf[i]);
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_csv())
    }
}

pub fn tw_cdf(table: &TwTable, s: f64) -> f64 {
    table.cdf(s)
}

pub const QUANTILE_P_MIN: f64 = 1e-6;
pub const QUANTILE_P_MAX: f64 = 1.0 - 1e-8;

/// Inverse CDF by bisection.
pub fn tw_quantile(table: &TwTable, p: f64) -> Result<f64, TwError> {
    if !(QUANTILE_P_MIN..=QUANTILE_P_MAX).contains(&p) {
        return Err(TwError::OutOfRange(p));
    }
    let (mut lo, mut hi) = (GRID_LEFT, GRID_RIGHT);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if table.cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Kolmogorov–Smirnov distance between the empirical CDF of `samples` and the table.
pub fn ks_distance(samples: &[f64], table: &TwTable) -> Result<f64, TwError> {
    if samples.is_empty() {
        return Err(TwError::InvalidArgument("no samples".into()));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(TwError::InvalidArgument("NaN sample".into()));
    }
    let sorted_copy;
    let xs = if samples.windows(2).all(|w| w[0] <= w[1]) {
        samples
    } else {
        let mut v = samples.to_vec();
        v.sort_by(f64::total_cmp);
        sorted_copy = v;
        &sorted_copy
    };
    let m = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = table.cdf(x);
        d = d.max((i + 1) as f64 / m - f).max(f - i as f64 / m);
    }
    Ok(d)
}
