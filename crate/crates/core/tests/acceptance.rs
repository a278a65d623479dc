//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! The statistical criteria run the campaigns at full desk scale and take
//! tens of minutes on a single core. `ACCEPTANCE_THREADS` sets the pool size
//! (default: all cores).

mod common;

use std::time::Instant;

use common::fredholm::f1_fredholm;
use regedge::experiments::identities::{dbm_block, forest_block, free_conv_block, self_consistency_block, tree_block, ward_block};
use regedge::experiments::{
    run_edge_fluctuation, run_ramanujan_fraction, run_rigidity, ExperimentConfig, ExperimentError, IdentityCheck,
    RunReport, IDENTITY_DBM_SAMPLES,
};
use regedge::tracy_widom::{build_table, TwOrder};

type Outcome = Result<(bool, String), ExperimentError>;

struct Criterion {
    id: u32,
    name: &'static str,
    /// Hard runtime limit in seconds, where one is stated.
    limit: Option<f64>,
    run: fn() -> Outcome,
}

fn threads() -> usize {
    std::env::var("ACCEPTANCE_THREADS").ok().and_then(|v| v.parse().ok()).unwrap_or(0)
}

fn config(n: usize, d: usize, graphs: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig { n, d, num_graphs: graphs, seed, threads: threads(), ..Default::default() }
}

fn checks_outcome(checks: Vec<IdentityCheck>) -> Outcome {
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| format!("{}={:.3e}", c.name, c.residual)).collect();
    let worst = checks
        .iter()
        .map(|c| {
            if c.tolerance > 0.0 {
                format!("{} {:.1e}/{:.0e}", c.name, c.residual, c.tolerance)
            } else {
                format!("{} exact", c.name)
            }
        })
        .collect::<Vec<_>>();
    let detail = if failed.is_empty() { worst.join(", ") } else { format!("failed: {}", failed.join(", ")) };
    Ok((failed.is_empty(), detail))
}

fn c1_green() -> Outcome {
    checks_outcome(ward_block(1, false)?)
}

fn c2_forest() -> Outcome {
    checks_outcome(forest_block(1)?)
}

fn c3_self_consistency() -> Outcome {
    checks_outcome(self_consistency_block()?)
}

fn c4_tree() -> Outcome {
    checks_outcome(tree_block()?)
}

fn c5_constrained_goe() -> Outcome {
    checks_outcome(dbm_block(1, IDENTITY_DBM_SAMPLES)?)
}

fn c6_free_conv() -> Outcome {
    checks_outcome(free_conv_block()?)
}

fn c7_tracy_widom() -> Outcome {
    let t1 = build_table(TwOrder::One)?;
    let t2 = build_table(TwOrder::Two)?;
    let f0 = t1.cdf(0.0);
    let mut ok = (0.82..=0.84).contains(&f0) && (0.67..=0.71).contains(&(f0 * f0));
    let mut worst: f64 = 0.0;
    for s in [-4.0, -2.0, 0.0, 2.0] {
        worst = worst.max((t1.cdf(s) - f1_fredholm(s, 60)).abs());
        worst = worst.max((t2.cdf(s) - common::fredholm::f2_fredholm(s, 60)).abs());
    }
    ok &= worst <= 1e-6;
    Ok((ok, format!("F1(0) = {f0:.6}, F1(0)^2 = {:.6}, max |painleve - fredholm| = {worst:.2e}", f0 * f0)))
}

fn ks_of(report: &RunReport) -> f64 {
    report.aggregate.ks.unwrap_or(f64::NAN)
}

fn c8_edge_fluctuation() -> Outcome {
    let main = run_edge_fluctuation(&config(2000, 12, 2000, 1))?;
    let ks = ks_of(&main);
    let mean_x = main.aggregate.metrics["mean_top"];
    let mut detail = format!("KS = {ks:.4} (<= 0.08), mean X = {mean_x:.3}; trend");
    let mut trend = Vec::new();
    for n in [500, 1000, 2000] {
        let mut sum = 0.0;
        for seed in 1..=3u64 {
            sum += if n == 2000 && seed == 1 { ks } else { ks_of(&run_edge_fluctuation(&config(n, 12, 2000, seed))?) };
        }
        trend.push(sum / 3.0);
        detail.push_str(&format!(" n={n}: {:.4}", sum / 3.0));
    }
    let nonincreasing = trend.windows(2).all(|w| w[1] <= w[0]);
    Ok((ks <= 0.08 && nonincreasing && mean_x < 0.0, detail))
}

fn c9_ramanujan() -> Outcome {
    let r = run_ramanujan_fraction(&config(1000, 10, 2000, 1))?;
    let f = r.aggregate.fraction.unwrap_or(f64::NAN);
    let ci = r.aggregate.ci95.clone().expect("non-empty campaign");
    let noted = r.notes.iter().any(|n| n.contains("finite-N"));
    Ok((
        (0.55..=0.80).contains(&f) && noted,
        format!("fraction = {f:.4} (95% CI {:.4}..{:.4}), reference {:.4}", ci.low, ci.high, r.aggregate.metrics["reference_fraction"]),
    ))
}

fn c10_rigidity() -> Outcome {
    let r = run_rigidity(&config(1024, 12, 50, 1))?;
    let m = &r.aggregate.metrics;
    let p99 = m["ratio_p99"];
    Ok((p99 <= 20.0, format!("p99 ratio = {p99:.3} (<= 20), failed graphs {}", r.aggregate.failed)))
}

fn c11_reproducibility() -> Outcome {
    let runs: [(&str, fn(&ExperimentConfig) -> Result<RunReport, ExperimentError>, ExperimentConfig); 3] = [
        ("ramanujan", run_ramanujan_fraction, config(1000, 10, 64, 7)),
        ("edge-fluct", run_edge_fluctuation, config(500, 12, 64, 7)),
        ("rigidity", run_rigidity, config(256, 6, 16, 7)),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, run, cfg) in runs {
        let mut csvs = Vec::new();
        for t in [1, 2, 5] {
            let c = ExperimentConfig { threads: t, ..cfg.clone() };
            csvs.push(run(&c)?.samples_csv(false));
        }
        // same thread count, fresh run
        csvs.push(run(&ExperimentConfig { threads: 1, ..cfg.clone() })?.samples_csv(false));
        let same = csvs.iter().all(|c| c.as_bytes() == csvs[0].as_bytes());
        ok &= same;
        detail.push(format!("{name}: {}", if same { "identical" } else { "DIFFERENT" }));
    }
    Ok((ok, format!("threads 1/2/5 and a rerun: {}", detail.join(", "))))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "green-function identities", limit: Some(10.0), run: c1_green },
        Criterion { id: 2, name: "forest sum rule", limit: Some(5.0), run: c2_forest },
        Criterion { id: 3, name: "self-consistent equations", limit: Some(2.0), run: c3_self_consistency },
        Criterion { id: 4, name: "tree resolvent", limit: Some(30.0), run: c4_tree },
        Criterion { id: 5, name: "constrained GOE", limit: Some(60.0), run: c5_constrained_goe },
        Criterion { id: 6, name: "free convolution edge", limit: Some(5.0), run: c6_free_conv },
        Criterion { id: 7, name: "Tracy-Widom evaluators", limit: Some(20.0), run: c7_tracy_widom },
        Criterion { id: 8, name: "edge fluctuations vs TW1", limit: None, run: c8_edge_fluctuation },
        Criterion { id: 9, name: "Ramanujan fraction", limit: None, run: c9_ramanujan },
        Criterion { id: 10, name: "rigidity", limit: None, run: c10_rigidity },
        Criterion { id: 11, name: "thread-count reproducibility", limit: None, run: c11_reproducibility },
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = 0;
    for c in criteria.iter().filter(|c| only.is_empty() || only.contains(&c.id)) {
        let start = Instant::now();
        let outcome = (c.run)();
        let secs = start.elapsed().as_secs_f64();
        let (mut pass, detail) = match outcome {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        let mut timing = format!("{secs:.1} s");
        if let Some(limit) = c.limit {
            timing.push_str(&format!(" (< {limit} s)"));
            pass &= secs < limit;
        }
        println!("{} {:>2} {}: {detail} [{timing}]", if pass { "PASS" } else { "FAIL" }, c.id, c.name);
        failures += usize::from(!pass);
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
