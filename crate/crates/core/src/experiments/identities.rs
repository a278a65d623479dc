//! Deterministic identity checks at fixed small sizes, grouped in blocks.

use num_complex::Complex64;
use rand::Rng as _;

use super::report::IdentityCheck;
use super::ExperimentError;
use crate::dbm::{covariance_patterns, ibp_residual, sample_constrained_goe};
use crate::free_conv::{edge_state, edge_velocity, md_prime};
use crate::graph::{forest_sum, sample_regular, Forest, SamplerOptions};
use crate::limit_laws::{m_d, m_sc, p_inf_evaluate, tree_green_closed_form, tree_green_oracle};
use crate::rng::{derive_seed, rng_from_seed};
use crate::spectral::{green_function, normalized_matrix, ward_residual, SpectralParameter};

pub const WARD_TOL: f64 = 1e-10;
pub const ROW_SUM_TOL: f64 = 1e-10;
pub const GH_TOL: f64 = 1e-9;
/// Size of the corruption used by fault injection.
pub const FAULT_SIZE: f64 = 1e-3;

/// Ward identity, vanishing row sums and `G H = z G + I - 11^T/N` on 20 random
/// `(graph, z)` pairs with `N in {64, 256}`, `d in {4, 8}`.
///
/// With `fault`, entry `(0, 1)` of the first Green's function is shifted by
/// [`FAULT_SIZE`] before the Ward check only.
pub fn ward_block(seed: u64, fault: bool) -> Result<Vec<IdentityCheck>, ExperimentError> {
    let mut ward: f64 = 0.0;
    let mut rows: f64 = 0.0;
    let mut gh: f64 = 0.0;
    let mut idx = 0u64;
    for (n, d) in [(64, 4), (64, 8), (256, 4), (256, 8)] {
        for _ in 0..5 {
            let s = derive_seed(seed, idx);
            let g = sample_regular(n, d, s, &SamplerOptions::default())?;
            let mut rng = rng_from_seed(derive_seed(s, 1));
            let energy = rng.random_range(-2.5..2.5);
            let eta = 10f64.powf(rng.random_range(-1.5..0.0));
            let z = SpectralParameter::new(energy, eta)?;
            let green = green_function(&g, z)?;
            let h = normalized_matrix(&g)?;
            rows = rows.max(green.max_line_sum());
            gh = gh.max(green.resolvent_residual(&h));
            let w = if fault && idx == 0 {
                let mut bad = green.clone();
                bad.corrupt_entry(0, 1, Complex64::new(FAULT_SIZE, 0.0));
                ward_residual(&bad)
            } else {
                ward_residual(&green)
            };
            ward = ward.max(w);
            idx += 1;
        }
    }
    let detail = if fault { "fault injected into G_01 of pair 0" } else { "" };
    Ok(vec![
        IdentityCheck::new("green", "ward", ward, WARD_TOL).with_detail(detail),
        IdentityCheck::new("green", "row_sums", rows, ROW_SUM_TOL),
        IdentityCheck::new("green", "gh_expansion", gh, GH_TOL),
    ])
}

/// The five forests of the sum rule, with names.
pub fn sum_rule_forests() -> Vec<(&'static str, Forest)> {
    vec![
        ("edge", Forest::edge()),
        ("path-2", Forest::path(2)),
        ("path-3", Forest::path(3)),
        ("star-3", Forest::star(3)),
        ("edge+singleton", Forest::edge().with_singletons(1)),
    ]
}

/// Unrestricted forest sums equal `N^theta d^|E|` exactly on 10 graphs with
/// `N = 32`, `d = 4`; the distinct path-2 sum equals `N d (d - 1)`.
pub fn forest_block(seed: u64) -> Result<Vec<IdentityCheck>, ExperimentError> {
    let (n, d) = (32usize, 4usize);
    let forests = sum_rule_forests();
    let mut mismatches = vec![0usize; forests.len()];
    let mut distinct_mismatch = 0usize;
    for k in 0..10 {
        let g = sample_regular(n, d, derive_seed(seed, 100 + k), &SamplerOptions::default())?;
        for (i, (_, f)) in forests.iter().enumerate() {
            let want = (n as u128).pow(f.theta() as u32) * (d as u128).pow(f.edges().len() as u32);
            if forest_sum(&g, f, false)? != want {
                mismatches[i] += 1;
            }
        }
        if forest_sum(&g, &Forest::path(2), true)? != (n * d * (d - 1)) as u128 {
            distinct_mismatch += 1;
        }
    }
    let mut out: Vec<IdentityCheck> = forests
        .iter()
        .zip(&mismatches)
        .map(|((name, _), &m)| {
            IdentityCheck::new("forest", format!("sum_{name}"), m as f64, 0.0).with_detail("graphs with a mismatch")
        })
        .collect();
    out.push(
        IdentityCheck::new("forest", "distinct_path-2", distinct_mismatch as f64, 0.0).with_detail("graphs with a mismatch"),
    );
    Ok(out)
}

/// 100-point grid: energies in `[-3, 3]`, `eta` from `1e-3` to `10`.
pub fn z_grid() -> Vec<Complex64> {
    let mut zs = Vec::with_capacity(100);
    for i in 0..10 {
        for j in 0..10 {
            let e = -3.0 + 6.0 * i as f64 / 9.0;
            let eta = 10f64.powf(-3.0 + 4.0 * j as f64 / 9.0);
            zs.push(Complex64::new(e, eta));
        }
    }
    zs
}

/// `1 + z m_sc + m_sc^2 = 0` and `P(z, m_d(z)) = 0` for `d in {5, 8, 20, 100}`.
pub fn self_consistency_block() -> Result<Vec<IdentityCheck>, ExperimentError> {
    let zs = z_grid();
    let sc = zs
        .iter()
        .map(|&z| {
            let m = m_sc(z);
            (1.0 + z * m + m * m).norm()
        })
        .fold(0.0, f64::max);
    let mut out = vec![IdentityCheck::new("self_consistency", "semicircle", sc, 1e-12)];
    for d in [5.0, 8.0, 20.0, 100.0] {
        let mut worst: f64 = 0.0;
        for &z in &zs {
            worst = worst.max(p_inf_evaluate(z, m_d(z, d), d)?.norm());
        }
        out.push(IdentityCheck::new("self_consistency", format!("p_inf_d{d}"), worst, 1e-10));
    }
    Ok(out)
}

/// Truncated-tree resolvent against the infinite-tree formula at `d = 3`, `z = i`.
pub fn tree_block() -> Result<Vec<IdentityCheck>, ExperimentError> {
    let z = Complex64::new(0.0, 1.0);
    let mut out = Vec::new();
    for dist in 0..3 {
        let exact = tree_green_closed_form(3, z, dist);
        let errs: Vec<f64> = [8, 11, 14]
            .iter()
            .map(|&depth| tree_green_oracle(3, depth, z, dist).map(|g| (g - exact).norm()))
            .collect::<Result<_, _>>()?;
        out.push(
            IdentityCheck::new("tree", format!("dist{dist}"), errs[2], 1e-3)
                .with_detail(format!("errors at depth 8/11/14: {:.3e} {:.3e} {:.3e}", errs[0], errs[1], errs[2])),
        );
        let monotone = errs[0] > errs[1] && errs[1] > errs[2];
        out.push(IdentityCheck::new("tree", format!("dist{dist}_monotone"), if monotone { 0.0 } else { 1.0 }, 0.0));
    }
    Ok(out)
}

/// Constrained GOE covariance patterns (3 sigma), zero row sums and the
/// integration-by-parts formula for a quadratic function (4 sigma), `N = 8`.
pub fn dbm_block(seed: u64, samples: usize) -> Result<Vec<IdentityCheck>, ExperimentError> {
    let n = 8;
    let mut out: Vec<IdentityCheck> = covariance_patterns(n, samples, derive_seed(seed, 200))?
        .iter()
        .map(|p| {
            IdentityCheck::new("dbm", format!("cov_{}", p.pattern), p.z_score(), 3.0)
                .with_detail(format!("mean {:.5e}, exact {:.5e}, in standard errors", p.mean, p.expected))
        })
        .collect();
    let w = sample_constrained_goe(n, derive_seed(seed, 201))?;
    out.push(IdentityCheck::new("dbm", "row_sums", w.max_row_sum(), 1e-14));
    let sym = if w.is_symmetric() { 0.0 } else { 1.0 };
    out.push(IdentityCheck::new("dbm", "symmetric", sym, 0.0));
    out.push(
        IdentityCheck::new("dbm", "ibp_quadratic", ibp_residual(n, samples, derive_seed(seed, 202))?, 4.0)
            .with_detail("in standard errors"),
    );
    Ok(out)
}

/// Edge equation, edge velocity by centered differences and the large-`d` limit.
pub fn free_conv_block() -> Result<Vec<IdentityCheck>, ExperimentError> {
    let h = 1e-3;
    let mut eq: f64 = 0.0;
    let mut vel: f64 = 0.0;
    for d in [8.0, 100.0] {
        for t in [0.1f64, 0.5, 1.0] {
            let s = edge_state(t, d)?;
            let r = md_prime(Complex64::new(s.z_plus, 0.0), d)?.re * t.exp_m1();
            eq = eq.max((r - 1.0).abs());
            let fd = (edge_state(t + h, d)?.e_plus - edge_state(t - h, d)?.e_plus) / (2.0 * h);
            vel = vel.max((edge_velocity(t, d)? - fd).abs());
        }
    }
    let mut limit: f64 = 0.0;
    for t in [0.1, 0.5, 1.0] {
        limit = limit.max((edge_state(t, 1e6)?.e_plus - 2.0).abs());
    }
    Ok(vec![
        IdentityCheck::new("free_conv", "edge_equation", eq, 1e-10),
        IdentityCheck::new("free_conv", "velocity_fd", vel, 10.0 * h * h),
        IdentityCheck::new("free_conv", "large_d_edge", limit, 1e-3),
    ])
}

/// Every block, in a fixed order.
pub fn all_blocks(seed: u64, fault: bool, dbm_samples: usize) -> Result<Vec<IdentityCheck>, ExperimentError> {
    let mut out = ward_block(seed, fault)?;
    out.extend(forest_block(seed)?);
    out.extend(self_consistency_block()?);
    out.extend(tree_block()?);
    out.extend(dbm_block(seed, dbm_samples)?);
    out.extend(free_conv_block()?);
    Ok(out)
}
