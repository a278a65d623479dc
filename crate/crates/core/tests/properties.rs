use std::collections::BTreeSet;

use proptest::prelude::*;
use regedge::experiments::stats::wilson_interval;
use regedge::graph::{apply_switch, is_switchable, mcmc_randomize, sample_regular, RegularGraph, SamplerOptions, SwitchMove};
use regedge::limit_laws::{classical_locations, m_d, rho_d};
use regedge::rng::derive_seed;
use regedge::Complex64;

fn degrees_ok(g: &RegularGraph) -> bool {
    g.validate().is_ok() && g.degree_vector().iter().all(|&k| k == g.d())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sampled_graphs_are_simple_and_regular(half_n in 5usize..40, d in 2usize..6, seed in any::<u64>()) {
        let n = 2 * half_n;
        let g = sample_regular(n, d, seed, &SamplerOptions::default()).unwrap();
        prop_assert!(degrees_ok(&g));
        prop_assert_eq!(g.num_edges(), n * d / 2);
    }

    #[test]
    fn switch_then_inverse_is_identity(seed in any::<u64>(), picks in prop::collection::vec(any::<(u16, u16)>(), 1..20)) {
        let g = sample_regular(30, 4, seed, &SamplerOptions::default()).unwrap();
        let edges = g.edges();
        for (a, b) in picks {
            let (i, j) = edges[a as usize % edges.len()];
            let (k, l) = edges[b as usize % edges.len()];
            let Ok(m) = SwitchMove::new(i, j, k, l) else { continue };
            if !is_switchable(&g, &m).unwrap() {
                continue;
            }
            let h = apply_switch(&g, &m).unwrap();
            prop_assert!(degrees_ok(&h));
            prop_assert_eq!(apply_switch(&h, &m.inverse()).unwrap().edges(), g.edges());
        }
    }

    #[test]
    fn chain_preserves_regularity(seed in any::<u64>(), steps in 0u64..2000) {
        let g = RegularGraph::circulant(24, 6).unwrap();
        prop_assert!(degrees_ok(&mcmc_randomize(&g, steps, seed)));
    }

    #[test]
    fn kesten_mckay_transform_is_herglotz(e in -4.0f64..4.0, eta in 1e-4f64..10.0, d in 3.0f64..200.0) {
        let z = Complex64::new(e, eta);
        let m = m_d(z, d);
        prop_assert!(m.im >= 0.0);
        // |m| <= 1 / Im z for any probability measure
        prop_assert!(m.norm() <= 1.0 / eta * (1.0 + 1e-12));
    }

    #[test]
    fn wilson_interval_brackets_estimate(n in 1usize..5000, frac in 0.0f64..=1.0) {
        let k = (frac * n as f64).floor() as usize;
        let ci = wilson_interval(k, n).unwrap();
        let p = k as f64 / n as f64;
        prop_assert!(0.0 <= ci.low && ci.low <= p && p <= ci.high && ci.high <= 1.0);
    }

    #[test]
    fn seed_derivation_separates_indices(master in any::<u64>(), a in 0u64..1_000_000, b in 0u64..1_000_000) {
        prop_assume!(a != b);
        prop_assert_ne!(derive_seed(master, a), derive_seed(master, b));
    }
}

/// Labels the 2-regular graph on 6 vertices as a hexagon (true) or two triangles.
fn is_hexagon(g: &RegularGraph) -> bool {
    let (mut prev, mut cur, mut len) = (usize::MAX, 0usize, 0);
    loop {
        let next = g.neighbors(cur).iter().map(|&v| v as usize).find(|&v| v != prev).unwrap();
        prev = cur;
        cur = next;
        len += 1;
        if cur == 0 {
            return len == 6;
        }
    }
}

#[test]
fn switch_chain_is_uniform_on_six_vertices() {
    // Exhaustive count over all edge subsets of K6.
    let pairs: Vec<(usize, usize)> = (0..6).flat_map(|i| (i + 1..6).map(move |j| (i, j))).collect();
    let (mut hex, mut tri) = (0u32, 0u32);
    for mask in 0u32..1 << pairs.len() {
        let edges: Vec<_> = pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e).collect();
        if let Ok(g) = RegularGraph::from_edges(6, 2, &edges) {
            if is_hexagon(&g) {
                hex += 1;
            } else {
                tri += 1;
            }
        }
    }
    assert_eq!((hex, tri), (60, 10));
    let p = hex as f64 / (hex + tri) as f64;

    // Independent chains from the hexagon; 200 proposals each is far past mixing on 70 states.
    let start = RegularGraph::cycle(6).unwrap();
    let runs = 4000;
    let mut distinct = BTreeSet::new();
    let mut hits = 0usize;
    for r in 0..runs {
        let g = mcmc_randomize(&start, 200, derive_seed(77, r));
        distinct.insert(g.edges());
        hits += is_hexagon(&g) as usize;
    }
    let sigma = (p * (1.0 - p) * runs as f64).sqrt();
    let z = (hits as f64 - p * runs as f64) / sigma;
    assert!(z.abs() <= 3.0, "hexagon share {hits}/{runs}, z = {z:.2}");
    assert_eq!(distinct.len(), 70);
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for i in 1..panels {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn classical_locations_at_largest_desk_size() {
    let n = 4096;
    for d in [3.0, 12.0, 60.0] {
        let loc = classical_locations(n, d).unwrap();
        assert!(loc.max_residual() <= 1e-10, "d = {d}: {}", loc.max_residual());
        // Mass between consecutive bulk locations is 1/(N-1).
        for k in [100, 1000, 2048, 3000, 4000] {
            let mass = simpson(|x| rho_d(x, d), loc.gamma(k + 1), loc.gamma(k), 200);
            assert!((mass * (n - 1) as f64 - 1.0).abs() < 1e-6, "d = {d}, k = {k}: {mass}");
        }
    }
}
