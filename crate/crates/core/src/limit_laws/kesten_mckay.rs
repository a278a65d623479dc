use num_complex::Complex64;

use crate::quad::integrate;

/// Kesten–McKay law with parameter `d >= 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KestenMcKay {
    pub d: f64,
}

impl KestenMcKay {
    pub fn new(d: f64) -> Self {
        assert!(d >= 2.0, "Kesten–McKay parameter must be at least 2");
        Self { d }
    }

    pub fn density(&self, x: f64) -> f64 {
        rho_d(x, self.d)
    }

    pub fn stieltjes(&self, z: Complex64) -> Complex64 {
        m_d(z, self.d)
    }
}

/// `rho_d(x) = (1 + 1/(d-1) - x^2/d)^{-1} sqrt([4 - x^2]_+) / (2 pi)`.
pub fn rho_d(x: f64, d: f64) -> f64 {
    let s = 4.0 - x * x;
    if s <= 0.0 {
        return 0.0;
    }
    s.sqrt() / (2.0 * std::f64::consts::PI * (1.0 + 1.0 / (d - 1.0) - x * x / d))
}

fn upper_half(z: Complex64) -> Complex64 {
    // -0.0 imaginary parts would pick the lower branch of the square roots.
    Complex64::new(z.re, if z.im == 0.0 { 0.0 } else { z.im })
}

fn sqrt_z2_minus_4(z: Complex64) -> Complex64 {
    let z = upper_half(z);
    (z - 2.0).sqrt() * (z + 2.0).sqrt()
}

/// Semicircle Stieltjes transform, the root of `1 + z m + m^2 = 0` with
/// `Im m > 0`; on the real axis the limit from the upper half-plane.
pub fn m_sc(z: Complex64) -> Complex64 {
    let z = upper_half(z);
    -2.0 / (z + sqrt_z2_minus_4(z))
}

pub fn m_sc_prime(z: Complex64) -> Complex64 {
    -m_sc(z) / sqrt_z2_minus_4(z)
}

pub fn m_sc_second(z: Complex64) -> Complex64 {
    let mp = m_sc_prime(z);
    -mp * (2.0 + 2.0 * mp) / sqrt_z2_minus_4(z)
}

/// `m_d(z) = -(z + d/(d-1) m_sc(z))^{-1}`.
pub fn m_d(z: Complex64, d: f64) -> Complex64 {
    let a = d / (d - 1.0);
    -1.0 / (upper_half(z) + a * m_sc(z))
}

pub fn m_d_prime(z: Complex64, d: f64) -> Complex64 {
    let a = d / (d - 1.0);
    let md = m_d(z, d);
    md * md * (1.0 + a * m_sc_prime(z))
}

pub fn m_d_second(z: Complex64, d: f64) -> Complex64 {
    let a = d / (d - 1.0);
    let md = m_d(z, d);
    let mdp = m_d_prime(z, d);
    2.0 * md * mdp * (1.0 + a * m_sc_prime(z)) + md * md * a * m_sc_second(z)
}

/// `int rho_d(x) / (x - z) dx` by adaptive quadrature in `x = 2 sin(theta)`.
pub fn stieltjes_by_quadrature(z: Complex64, d: f64, tol: f64) -> Complex64 {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let weight = |th: f64| {
        let x = 2.0 * th.sin();
        rho_d(x, d) * 2.0 * th.cos()
    };
    let re = integrate(
        |th| {
            let x = 2.0 * th.sin();
            weight(th) * (Complex64::new(x, 0.0) - z).inv().re
        },
        -half_pi,
        half_pi,
        tol,
        0.0,
    );
    let im = integrate(
        |th| {
            let x = 2.0 * th.sin();
            weight(th) * (Complex64::new(x, 0.0) - z).inv().im
        },
        -half_pi,
        half_pi,
        tol,
        0.0,
    );
    Complex64::new(re.value, im.value)
}
