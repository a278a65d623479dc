//! Command-line front end for the regular-graph spectral campaigns.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use regedge::experiments::{
    exit_code, CampaignRegistry, ExperimentConfig, ExperimentError, RunReport, EXIT_CONFIG_ERROR, EXIT_RUNTIME_ERROR,
};
use regedge::tracy_widom::{build_table_with, TwOptions, TwOrder, DEFAULT_TOLERANCE};

#[derive(Parser)]
#[command(name = "regedge", version, about = "Spectral statistics of random regular graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fraction of graphs with all nontrivial eigenvalues of H in [-2, 2].
    Ramanujan(CampaignArgs),
    /// N^{2/3}(lambda_2 - 2) against Tracy–Widom (GOE).
    EdgeFluct(CampaignArgs),
    /// Full spectrum against the Kesten–McKay classical locations.
    Rigidity(CampaignArgs),
    /// Deterministic identity checks; exits with 2 if any fails.
    Identities(IdentityArgs),
    /// lambda_2 of H(t) against the free-convolution edge.
    Interp(InterpArgs),
    /// Writes the Tracy–Widom table as CSV (s,q,cdf).
    TwTable(TwTableArgs),
}

#[derive(Args, Clone, Default)]
struct CampaignArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    graphs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory for report.json, samples.csv and histogram.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plain-text key=value file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra key=value overrides, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Fill the wall_ms column of samples.csv.
    #[arg(long)]
    record_timing: bool,
}

#[derive(Args, Clone)]
struct IdentityArgs {
    #[command(flatten)]
    common: CampaignArgs,
    /// Corrupt one Green's function entry to exercise the Ward check.
    #[arg(long)]
    fault_injection: bool,
}

#[derive(Args, Clone)]
struct InterpArgs {
    #[command(flatten)]
    common: CampaignArgs,
    #[arg(long)]
    t: Option<f64>,
}

#[derive(Args, Clone)]
struct TwTableArgs {
    /// 1 (GOE) or 2 (GUE).
    #[arg(long, default_value_t = 1)]
    order: u8,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Output directory; the file is tw{order}.csv. Prints to stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_config(args: &CampaignArgs, extra: &[(&str, String)]) -> Result<ExperimentConfig, ExperimentError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| ExperimentError::Config(format!("--set expects KEY=VALUE, got '{kv}'")))?;
        cfg.set(k, v)?;
    }
    let flags: [(&str, Option<String>); 5] = [
        ("n", args.n.map(|v| v.to_string())),
        ("d", args.d.map(|v| v.to_string())),
        ("num_graphs", args.graphs.map(|v| v.to_string())),
        ("seed", args.seed.map(|v| v.to_string())),
        ("threads", args.threads.map(|v| v.to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, &v)?;
        }
    }
    for (k, v) in extra {
        cfg.set(k, v)?;
    }
    if let Some(out) = &args.out {
        cfg.output_path = Some(out.clone());
    }
    if args.record_timing {
        cfg.record_timing = true;
    }
    Ok(cfg)
}

fn summarize(report: &RunReport) {
    let a = &report.aggregate;
    println!("campaign     {}", report.campaign);
    println!("config hash  {}", report.provenance.config_hash);
    if !report.records.is_empty() {
        println!("graphs       {} ok, {} failed", a.count, a.failed);
    }
    if let (Some(f), Some(ci)) = (a.fraction, &a.ci95) {
        println!("ramanujan    {f:.4}  (95% CI {:.4} .. {:.4})", ci.low, ci.high);
    }
    if let Some(ks) = a.ks {
        println!("ks(TW1)      {ks:.4}");
    }
    for (k, v) in &a.metrics {
        println!("{k:<24} {v:.6}");
    }
    for c in &report.identities {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        println!("{mark} {}/{}: {:.3e} (tol {:.1e}) {}", c.block, c.name, c.residual, c.tolerance, c.detail);
    }
    if let Some(p) = a.passed {
        println!("verdict      {}", if p { "pass" } else { "fail" });
    }
    for n in &report.notes {
        println!("note: {n}");
    }
    println!("elapsed      {:.1} s", report.total_ms / 1e3);
}

fn run_campaign(name: &str, args: &CampaignArgs, extra: &[(&str, String)]) -> ExitCode {
    let cfg = match build_config(args, extra).and_then(|c| c.validate().map(|_| c)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let campaign = CampaignRegistry::builtin().build(name, &()).expect("campaign is registered");
    let report = match campaign.run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    summarize(&report);
    if let Some(dir) = &cfg.output_path {
        if let Err(e) = report.write_to(dir, cfg.record_timing) {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_RUNTIME_ERROR as u8);
        }
        println!("wrote        {}", dir.display());
    }
    ExitCode::from(exit_code(&report) as u8)
}

fn tw_table(args: &TwTableArgs) -> anyhow::Result<()> {
    let order = TwOrder::try_from(args.order)?;
    let table = build_table_with(order, TwOptions { tol: args.tol, ..TwOptions::default() })?;
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(format!("tw{}.csv", order.as_u8()));
            table.write_csv(&path).with_context(|| format!("writing {}", path.display()))?;
            let (mean, var) = table.moments();
            println!("F{}(0) = {:.10}, mean {mean:.8}, variance {var:.8}", order.as_u8(), table.cdf(0.0));
            println!("wrote {}", path.display());
        }
        None => print!("{}", table.to_csv()),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match &cli.command {
        Command::Ramanujan(a) => run_campaign("ramanujan", a, &[]),
        Command::EdgeFluct(a) => run_campaign("edge-fluct", a, &[]),
        Command::Rigidity(a) => run_campaign("rigidity", a, &[]),
        Command::Identities(a) => {
            let extra = if a.fault_injection { vec![("fault_injection", "true".to_string())] } else { vec![] };
            run_campaign("identities", &a.common, &extra)
        }
        Command::Interp(a) => {
            let extra: Vec<(&str, String)> = a.t.map(|t| ("t", t.to_string())).into_iter().collect();
            run_campaign("interp", &a.common, &extra)
        }
        Command::TwTable(a) => match tw_table(a) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e:#}");
                let config = e.downcast_ref::<regedge::tracy_widom::TwError>().is_some_and(|t| {
                    matches!(t, regedge::tracy_widom::TwError::InvalidArgument(_))
                });
                ExitCode::from(if config { EXIT_CONFIG_ERROR } else { EXIT_RUNTIME_ERROR } as u8)
            }
        },
    }
}
