//! Deterministic control parameters and the spectral domain.

use super::{SpectralError, SpectralParameter};

/// Default value of the domain constant `K`.
pub const DEFAULT_DOMAIN_CONSTANT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlParams {
    pub lambda_o: f64,
    pub lambda_d: f64,
    pub in_domain: bool,
}

/// `Lambda_o = (N eta)^{-1/2} + d^{-1/2} + d^{3/2}/N`, `Lambda_d = Lambda_o^{1/2}`,
/// and membership of `z` in
/// `{|E| <= K, 0 < eta <= K, N eta sqrt(min(|E-2|, |E+2|) + eta) >= N^{1/K}}`.
pub fn control_params(z: SpectralParameter, n: usize, d: usize, k: f64) -> Result<ControlParams, SpectralError> {
    if !(k > 0.0) {
        return Err(SpectralError::InvalidRequest(format!("domain constant K must be positive, got {k}")));
    }
    let (nf, df) = (n as f64, d as f64);
    let (e, eta) = (z.energy(), z.eta());
    let lambda_o = 1.0 / (nf * eta).sqrt() + 1.0 / df.sqrt() + df.powf(1.5) / nf;
    let edge_dist = (e - 2.0).abs().min((e + 2.0).abs());
    let in_domain = e.abs() <= k && eta <= k && nf * eta * (edge_dist + eta).sqrt() >= nf.powf(1.0 / k);
    Ok(ControlParams { lambda_o, lambda_d: lambda_o.sqrt(), in_domain })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bulk_value() {
        let z = SpectralParameter::new(0.0, 1.0).unwrap();
        let c = control_params(z, 1_000_000, 100, DEFAULT_DOMAIN_CONSTANT).unwrap();
        assert!((c.lambda_o - 0.102).abs() < 1e-12);
        assert!((c.lambda_d - c.lambda_o.sqrt()).abs() < 1e-15);
        assert!(c.in_domain);
    }

    #[test]
    fn edge_membership_depends_on_k() {
        let z = SpectralParameter::new(2.0, 1e-2).unwrap();
        assert!(control_params(z, 1_000_000, 100, 10.0).unwrap().in_domain);
        assert!(control_params(z, 1_000_000, 100, 2.1).unwrap().in_domain);
        assert!(!control_params(z, 1_000_000, 100, 1.9).unwrap().in_domain);
    }

    #[test]
    fn eta_beyond_k_is_outside() {
        let z = SpectralParameter::new(0.0, 11.0).unwrap();
        assert!(!control_params(z, 1_000_000, 100, 10.0).unwrap().in_domain);
        assert!(control_params(z, 1000, 10, 0.0).is_err());
    }
}
