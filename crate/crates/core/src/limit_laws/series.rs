//! `P_inf(z, w) = 1 + z w + d/(d-1) w^2
//!   + sum_{k>=2} (-2)^{k-1} (2k-3)!!/k! d/(d-1)^k w^{2k}`.
//!
//! The `k = 1` coefficient of the general term equals `d/(d-1)`, so the sum is
//! accumulated from `k = 1` by the ratio
//! `t_{k+1} / t_k = -2 (2k-1)/(k+1) w^2/(d-1)`. The series converges for
//! `4|w|^2 < d-1`; its sum is `(d/2)(sqrt(1 + 4w^2/(d-1)) - 1)`.

use num_complex::Complex64;

use super::LimitLawError;

pub const KMAX_CAP: usize = 500;

/// Above this asymptotic term ratio [`p_inf_evaluate`] uses the closed form.
const SERIES_RATIO_LIMIT: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PSeries {
    pub value: Complex64,
    /// Index of the last retained term.
    pub kmax: usize,
    pub last_term: f64,
}

fn first_term(w: Complex64, d: f64) -> Complex64 {
    d / (d - 1.0) * w * w
}

fn next_term(t: Complex64, k: usize, w: Complex64, d: f64) -> Complex64 {
    let kf = k as f64;
    t * (-2.0 * (2.0 * kf - 1.0) / (kf + 1.0)) * (w * w / (d - 1.0))
}

/// Truncated sum through the `w^{2 kmax}` term.
pub fn p_inf(z: Complex64, w: Complex64, d: f64, kmax: usize) -> Result<Complex64, LimitLawError> {
    if kmax < 2 {
        return Err(LimitLawError::InvalidArgument(format!("kmax must be at least 2, got {kmax}")));
    }
    let mut t = first_term(w, d);
    let mut sum = 1.0 + z * w + t;
    for k in 1..kmax {
        t = next_term(t, k, w, d);
        sum += t;
    }
    if t.norm() > 1e-13 {
        return Err(LimitLawError::TruncationNotConverged { kmax, last_term: t.norm() });
    }
    Ok(sum)
}

/// Adds terms until the next one is below `1e-14 max(1, |partial sum|)`.
pub fn p_inf_adaptive(z: Complex64, w: Complex64, d: f64) -> Result<PSeries, LimitLawError> {
    let mut t = first_term(w, d);
    let mut sum = 1.0 + z * w + t;
    let mut k = 1;
    while k < KMAX_CAP {
        let next = next_term(t, k, w, d);
        if next.norm() < 1e-14 * sum.norm().max(1.0) {
            return Ok(PSeries { value: sum, kmax: k, last_term: t.norm() });
        }
        t = next;
        sum += t;
        k += 1;
    }
    if t.norm() > 1e-13 {
        return Err(LimitLawError::TruncationNotConverged { kmax: k, last_term: t.norm() });
    }
    Ok(PSeries { value: sum, kmax: k, last_term: t.norm() })
}

/// `1 + z w + (d/2)(sqrt(1 + 4 w^2/(d-1)) - 1)` with the principal root.
pub fn p_inf_closed_form(z: Complex64, w: Complex64, d: f64) -> Complex64 {
    let x = 4.0 * w * w / (d - 1.0);
    1.0 + z * w + d / 2.0 * x / ((1.0 + x).sqrt() + 1.0)
}

/// Limit `4|w|^2/(d-1)` of the term ratio; the series converges below 1.
pub fn series_ratio(w: Complex64, d: f64) -> f64 {
    4.0 * w.norm_sqr() / (d - 1.0)
}

/// Series when it converges quickly, closed-form continuation otherwise.
pub fn p_inf_evaluate(z: Complex64, w: Complex64, d: f64) -> Result<Complex64, LimitLawError> {
    if series_ratio(w, d) < SERIES_RATIO_LIMIT {
        Ok(p_inf_adaptive(z, w, d)?.value)
    } else {
        Ok(p_inf_closed_form(z, w, d))
    }
}

/// Whether `|t_{k+1}| <= |t_k|` for all `3 <= k < kmax`.
pub fn p_inf_terms_decreasing(w: Complex64, d: f64, kmax: usize) -> bool {
    let mut t = first_term(w, d);
    let mut prev = f64::INFINITY;
    for k in 1..kmax {
        if k >= 3 && t.norm() > prev {
            return false;
        }
        prev = t.norm();
        t = next_term(t, k, w, d);
    }
    kmax < 3 || t.norm() <= prev
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit_laws::m_d;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Coefficient from the printed formula, evaluated directly.
    fn coefficient(k: usize, d: f64) -> f64 {
        let mut dfact = 1.0;
        let mut j = 2 * k as i64 - 3;
        while j > 1 {
            dfact *= j as f64;
            j -= 2;
        }
        let kfact: f64 = (1..=k).map(|x| x as f64).product();
        (-2f64).powi(k as i32 - 1) * dfact / kfact * d / (d - 1.0).powi(k as i32)
    }

    #[test]
    fn ratio_recursion_matches_printed_coefficients() {
        let d = 7.0;
        let w = c(0.3, 0.2);
        let mut t = first_term(w, d);
        for k in 1..15 {
            let direct = coefficient(k, d) * w.powu(2 * k as u32);
            assert!((t - direct).norm() <= 1e-14 * direct.norm().max(1e-300), "k={k}");
            t = next_term(t, k, w, d);
        }
        assert_eq!(coefficient(2, 5.0), -5.0 / 16.0);
    }

    #[test]
    fn zero_argument() {
        assert_eq!(p_inf(c(0.3, 0.7), c(0.0, 0.0), 8.0, 10).unwrap(), c(1.0, 0.0));
        assert!(p_inf(c(0.3, 0.7), c(0.1, 0.0), 8.0, 1).is_err());
    }

    #[test]
    fn vanishes_at_m_d() {
        let z = c(0.3, 0.7);
        let w = m_d(z, 8.0);
        assert!(p_inf(z, w, 8.0, 80).unwrap().norm() <= 1e-10);
        let a = p_inf_adaptive(z, w, 8.0).unwrap();
        assert!(a.value.norm() <= 1e-10 && a.kmax < 80);
        assert!(p_inf_closed_form(z, w, 8.0).norm() <= 1e-14);
    }

    #[test]
    fn closed_form_equals_series_inside_radius() {
        for (w, d) in [(c(0.2, 0.5), 5.0), (c(-0.7, 0.1), 8.0), (c(0.9, 0.9), 20.0)] {
            let z = c(0.1, 0.4);
            let s = p_inf_adaptive(z, w, d).unwrap().value;
            assert!((s - p_inf_closed_form(z, w, d)).norm() < 1e-12);
        }
    }

    #[test]
    fn truncation_error_reported() {
        let z = c(0.0, 1.0);
        assert!(matches!(p_inf(z, c(0.9, 0.0), 5.0, 5), Err(LimitLawError::TruncationNotConverged { .. })));
        // outside the disc of convergence the series cannot converge
        assert!(p_inf_adaptive(z, c(1.2, 0.0), 5.0).is_err());
    }

    #[test]
    fn tail_control_where_series_converges() {
        for d in [5.0, 8.0, 20.0, 100.0] {
            for r in [0.1, 0.5, 0.8] {
                let w = Complex64::from_polar(r, 0.7);
                assert!(p_inf_terms_decreasing(w, d, 200), "d={d} |w|={r}");
            }
        }
        // at |w| = 1.1, d = 5 the ratio tends to 4 * 1.21 / 4 > 1
        assert!(!p_inf_terms_decreasing(c(1.1, 0.0), 5.0, 200));
    }

    #[test]
    fn evaluate_on_grid() {
        for d in [5.0, 8.0, 20.0, 100.0] {
            for i in 0..10 {
                for j in 0..10 {
                    let z = c(-3.0 + 6.0 * i as f64 / 9.0, 10f64.powf(-3.0 + 4.0 * j as f64 / 9.0));
                    let w = m_d(z, d);
                    assert!(p_inf_evaluate(z, w, d).unwrap().norm() <= 1e-10, "d={d} z={z}");
                }
            }
        }
    }
}
