//! Free convolution of the rescaled Kesten–McKay law with a semicircle of
//! variance `1 - e^{-t}`.
//!
//! With `xi(z; t) = e^{-t/2} z - e^{t/2}(1 - e^{-t}) m_d(z)` the time-`t`
//! Stieltjes transform satisfies `m_d(xi(z; t); t) = e^{t/2} m_d(z)`. The
//! spectral edges are `E_pm(t) = xi(z_pm(t); t)` where `z_pm` are the extreme
//! real solutions of `m_d'(z) = 1/(e^t - 1)`.

use num_complex::Complex64;
use thiserror::Error;

use crate::limit_laws::{m_d, m_d_prime};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FreeConvError {
    #[error("z = {0} lies on the support [-2, 2]")]
    OnSupport(f64),
    #[error("could not bracket the edge equation for t = {t}, d = {d}")]
    RootBracketFailure { t: f64, d: f64 },
    #[error("Newton iteration for the subordination equation diverged after {} iterates", trace.len())]
    NewtonDiverged { trace: Vec<Complex64> },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// `m_d'(z)`; real `z` must lie outside `[-2, 2]`.
pub fn md_prime(z: Complex64, d: f64) -> Result<Complex64, FreeConvError> {
    if z.im == 0.0 && z.re.abs() <= 2.0 {
        return Err(FreeConvError::OnSupport(z.re));
    }
    Ok(m_d_prime(z, d))
}

/// `xi(z; t)`.
pub fn xi(z: Complex64, t: f64, d: f64) -> Complex64 {
    (-t / 2.0).exp() * z - ((t / 2.0).exp() - (-t / 2.0).exp()) * m_d(z, d)
}

fn xi_prime(z: Complex64, t: f64, d: f64) -> Complex64 {
    (-t / 2.0).exp() - ((t / 2.0).exp() - (-t / 2.0).exp()) * m_d_prime(z, d)
}

/// `m_d`, `m_d'` and `m_d''` at the real point `z = 2 + u^2`, written in `u`
/// so that points very close to the edge keep full relative precision.
fn right_edge_chain(u: f64, d: f64) -> (f64, f64, f64, f64) {
    let a = d / (d - 1.0);
    let z = 2.0 + u * u;
    let s = u * (4.0 + u * u).sqrt();
    let m = -2.0 / (z + s);
    let mp = -m / s;
    let mpp = -mp * (2.0 + 2.0 * mp) / s;
    let md = -1.0 / (z + a * m);
    let mdp = md * md * (1.0 + a * mp);
    let mdpp = 2.0 * md * mdp * (1.0 + a * mp) + md * md * a * mpp;
    (z, md, mdp, mdpp)
}

/// Solves `m_d'(2 + u^2) = target` for `u > 0`; `m_d'` decreases in `u`.
fn solve_edge_u(target: f64, t: f64, d: f64) -> Result<f64, FreeConvError> {
    let f = |u: f64| right_edge_chain(u, d).2 - target;
    let fail = || FreeConvError::RootBracketFailure { t, d };
    let mut lo = 1e-6;
    while f(lo) <= 0.0 {
        lo *= 1e-2;
        if lo < 1e-150 {
            return Err(fail());
        }
    }
    let mut hi = 1.0;
    while f(hi) >= 0.0 {
        hi *= 2.0;
        if hi > 1e150 {
            return Err(fail());
        }
    }
    if hi < lo {
        return Err(fail());
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    let mut u = 0.5 * (lo + hi);
    for _ in 0..4 {
        let (_, _, mdp, mdpp) = right_edge_chain(u, d);
        let slope = mdpp * 2.0 * u;
        if slope == 0.0 {
            break;
        }
        let next = u - (mdp - target) / slope;
        if !(next > 0.0) || (next - u).abs() > 1e-6 * u {
            break;
        }
        u = next;
    }
    Ok(u)
}

/// Edge preimages, edge locations and edge velocities at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeState {
    pub t: f64,
    pub z_plus: f64,
    pub z_minus: f64,
    pub e_plus: f64,
    pub e_minus: f64,
    pub velocity_plus: f64,
    pub velocity_minus: f64,
}

fn check_time(t: f64) -> Result<(), FreeConvError> {
    if !(0.0..=2.0).contains(&t) {
        return Err(FreeConvError::InvalidArgument(format!("time must lie in [0, 2], got {t}")));
    }
    Ok(())
}

fn check_degree(d: f64) -> Result<(), FreeConvError> {
    if !(d > 2.0) {
        return Err(FreeConvError::InvalidArgument(format!("need d > 2, got {d}")));
    }
    Ok(())
}

/// Edge of one side: `sign = 1` for the right edge, `-1` for the left.
fn one_edge(t: f64, d: f64, sign: f64) -> Result<(f64, f64, f64), FreeConvError> {
    if t == 0.0 {
        let md2 = -(d - 1.0) / (d - 2.0);
        return Ok((2.0 * sign, 2.0 * sign, sign * -(1.0 + md2)));
    }
    let target = 1.0 / t.exp_m1();
    let u = solve_edge_u(target, t, d)?;
    let (z, md, _, _) = right_edge_chain(u, d);
    // m_d is odd on the real axis outside the support
    let (z, md) = (sign * z, sign * md);
    let e = (-t / 2.0).exp() * z - ((t / 2.0).exp() - (-t / 2.0).exp()) * md;
    let velocity = -0.5 * (e + 2.0 * (t / 2.0).exp() * md);
    Ok((z, e, velocity))
}

pub fn edge_state(t: f64, d: f64) -> Result<EdgeState, FreeConvError> {
    check_time(t)?;
    check_degree(d)?;
    let (z_plus, e_plus, velocity_plus) = one_edge(t, d, 1.0)?;
    let (z_minus, e_minus, velocity_minus) = one_edge(t, d, -1.0)?;
    Ok(EdgeState { t, z_plus, z_minus, e_plus, e_minus, velocity_plus, velocity_minus })
}

/// `d/dt E_+(t) = -(E_+ + 2 m_d(E_+; t)) / 2` with `m_d(E_+; t) = e^{t/2} m_d(z_+)`.
pub fn edge_velocity(t: f64, d: f64) -> Result<f64, FreeConvError> {
    if !(t > 0.0) {
        return Err(FreeConvError::InvalidArgument(format!("velocity needs t > 0, got {t}")));
    }
    Ok(edge_state(t, d)?.velocity_plus)
}

/// CSV `t,z_plus,E_plus,velocity_plus` along the given times.
pub fn edge_trajectory_csv(times: &[f64], d: f64) -> Result<String, FreeConvError> {
    let mut out = String::from("t,z_plus,E_plus,velocity_plus\n");
    for &t in times {
        let s = edge_state(t, d)?;
        out.push_str(&format!("{},{},{},{}\n", t, s.z_plus, s.e_plus, s.velocity_plus));
    }
    Ok(out)
}

const NEWTON_MAX_ITER: usize = 200;

fn damped_newton(z: Complex64, t: f64, d: f64, w0: Complex64, trace: &mut Vec<Complex64>) -> Option<Complex64> {
    let tol = 1e-13 * z.norm().max(1.0);
    let mut w = w0;
    let mut res = xi(w, t, d) - z;
    for _ in 0..NEWTON_MAX_ITER {
        trace.push(w);
        if res.norm() <= tol {
            return Some(w);
        }
        let step = res / xi_prime(w, t, d);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand = w - lambda * step;
            if cand.im > 0.0 {
                let r = xi(cand, t, d) - z;
                if r.norm() < res.norm() {
                    w = cand;
                    res = r;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted || !w.re.is_finite() || !w.im.is_finite() {
            return None;
        }
    }
    (res.norm() <= tol).then_some(w)
}

/// Subordination point `w` with `xi(w; t) = z`, `Im w > 0`.
pub fn subordination(z: Complex64, t: f64, d: f64) -> Result<Complex64, FreeConvError> {
    if !(z.im > 0.0) {
        return Err(FreeConvError::InvalidArgument(format!("need Im z > 0, got {z}")));
    }
    if t == 0.0 {
        return Ok(z);
    }
    let mut trace = Vec::new();
    let scale = (t / 2.0).exp();
    if let Some(w) = damped_newton(z, t, d, scale * z, &mut trace) {
        return Ok(w);
    }
    // Continuation in eta from far above the real axis.
    let mut eta = (4.0 + z.re.abs()).max(z.im);
    let mut w = scale * Complex64::new(z.re, eta);
    loop {
        let zk = Complex64::new(z.re, eta);
        match damped_newton(zk, t, d, w, &mut trace) {
            Some(next) => w = next,
            None => return Err(FreeConvError::NewtonDiverged { trace }),
        }
        if eta == z.im {
            return Ok(w);
        }
        eta = (eta * 0.5).max(z.im);
    }
}

/// `m_d(z; t) = e^{t/2} m_d(w)` with `w` the subordination point of `z`.
pub fn md_t(z: Complex64, t: f64, d: f64) -> Result<Complex64, FreeConvError> {
    check_degree(d)?;
    if t == 0.0 {
        if !(z.im > 0.0) {
            return Err(FreeConvError::InvalidArgument(format!("need Im z > 0, got {z}")));
        }
        return Ok(m_d(z, d));
    }
    let w = subordination(z, t, d)?;
    Ok((t / 2.0).exp() * m_d(w, d))
}
