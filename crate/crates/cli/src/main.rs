//! `cond`: reproducible experiment driver for the conditional-sampling
//! toolkit. Generates hard instances, runs the support-size estimators over
//! seeded trial grids, and executes the built-in checker suites.
//!
//! Exit codes: 0 success, 1 check failure, 2 usage or configuration error.
//! Global flags can also be set through environment variables prefixed
//! `COND_` (`COND_SEED`, `COND_THREADS`, `COND_FORMAT`).

mod checks;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cond_core::dist::PiecewiseDistribution;
use cond_core::io::{write_json, InstanceFile};
use cond_core::lb::equivalence::{gen_equivalence_instance, InstanceKind};
use cond_core::lb::hitting::RATIO_THRESHOLD;
use cond_core::lb::support_pair::gen_support_pair;
use cond_core::seed::derive_seed;
use cond_core::support::{
    estimate_support_checked, estimate_support_nonadaptive, nonadaptive_query_plan,
    nonadaptive_repetitions, SupportConfig,
};
use cond_core::{CondOracle, Rational};
use rayon::prelude::*;
use report::{summarize, summary_path, write_records, TrialRecord};
use serde_json::json;

#[derive(Parser)]
#[command(name = "cond", version, about = "Conditional-sampling experiment harness")]
struct Cli {
    /// Master seed (env: COND_SEED); per-trial seeds derive from it.
    #[arg(long, global = true, env = "COND_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads for trial parallelism (env: COND_THREADS). Worker
    /// count never affects results. Defaults to all cores.
    #[arg(long, global = true, env = "COND_THREADS")]
    threads: Option<usize>,
    /// Trial-record output format (env: COND_FORMAT).
    #[arg(long, global = true, env = "COND_FORMAT", value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a yes/no instance pair and write it as JSON.
    GenInstance(GenInstanceArgs),
    /// Run seeded support-size estimation trials and write a report.
    Estimate(EstimateArgs),
    /// Run a built-in checker suite (tv, hitting, lemmaA1, counting, atoms,
    /// fact54).
    Check(CheckArgs),
}

#[derive(Args)]
struct GenInstanceArgs {
    /// Instance family: equivalence | support-pair.
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: u64,
    /// yes | no.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Support ratio gamma for support-pair instances.
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    gamma: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EstimateArgs {
    /// Domain size.
    #[arg(long)]
    n: u64,
    /// True support size of the uniform-support instance.
    #[arg(long)]
    support: u64,
    /// Accuracy parameter in (0, 1/2) for the adaptive estimator; also sets
    /// the success window omega/(1+eps) .. (1+eps) omega.
    #[arg(long)]
    eps: f64,
    /// Minimum-mass promise as a rational, e.g. "1" or "1/2".
    #[arg(long, default_value = "1")]
    tau: String,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    /// Run the non-adaptive doubling-grid estimator instead.
    #[arg(long)]
    nonadaptive: bool,
    /// Constant overrides, all surfaced in the summary.
    #[arg(long)]
    c_cmp: Option<f64>,
    #[arg(long)]
    c_probe: Option<f64>,
    #[arg(long)]
    c_u: Option<f64>,
    #[arg(long)]
    c_na: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
}

#[derive(Args)]
struct CheckArgs {
    /// Checker name: tv | hitting | lemmaA1 | counting | atoms | fact54.
    which: String,
    /// Domain size (tv checker).
    #[arg(long, default_value_t = 1 << 16)]
    n: u64,
    /// Cases / vectors / point sets per suite.
    #[arg(long)]
    count: Option<u64>,
    /// log2 of the nominal domain for the hitting checker.
    #[arg(long, default_value_t = 4096.0)]
    log_n: f64,
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    /// Query-vector length for the hitting checker.
    #[arg(long, default_value_t = 40)]
    q: usize,
    /// Resonance threshold on sup_t C_t/t for the hitting checker.
    #[arg(long, default_value_t = RATIO_THRESHOLD)]
    ratio_threshold: f64,
    /// Grid resolution for the measure checker.
    #[arg(long, default_value_t = 100_000)]
    resolution: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: building thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::GenInstance(args) => {
            gen_instance(&args, args.seed.unwrap_or(cli.seed))?;
            Ok(0)
        }
        Command::Estimate(args) => {
            let format = match cli.format {
                Format::Csv => "csv",
                Format::Json => "json",
            };
            estimate(&args, args.seed.unwrap_or(cli.seed), format)?;
            Ok(0)
        }
        Command::Check(args) => check(&args, cli.seed),
    }
}

fn parse_kind(kind: &str) -> Result<InstanceKind> {
    match kind {
        "yes" => Ok(InstanceKind::Yes),
        "no" => Ok(InstanceKind::No),
        other => bail!("unknown kind {other:?}: expected yes or no"),
    }
}

fn gen_instance(args: &GenInstanceArgs, seed: u64) -> Result<()> {
    let kind = parse_kind(&args.kind)?;
    let file = match args.family.as_str() {
        "equivalence" => {
            let inst = gen_equivalence_instance(args.n, kind, seed)?;
            InstanceFile::from_equivalence(&inst)?
        }
        "support-pair" => {
            let inst = gen_support_pair(args.n, args.gamma, kind, seed)?;
            InstanceFile::from_support_pair(&inst)?
        }
        other => bail!("unknown family {other:?}: expected equivalence or support-pair"),
    };
    write_json(&args.out, &file)?;
    println!(
        "wrote {} {} instance (n = {}, seed = {seed}) to {}",
        file.family,
        file.kind,
        file.n,
        args.out.display()
    );
    Ok(())
}

fn parse_rational(text: &str) -> Result<Rational> {
    let parts: Vec<&str> = text.split('/').collect();
    let make = |num: i64, den: i64| -> Result<Rational> {
        if den == 0 {
            bail!("zero denominator in {text:?}");
        }
        Ok(Rational::new(num.into(), den.into()))
    };
    match parts.as_slice() {
        [num] => make(num.trim().parse()?, 1),
        [num, den] => make(num.trim().parse()?, den.trim().parse()?),
        _ => Err(anyhow!("cannot parse {text:?} as a rational")),
    }
}

fn estimate(args: &EstimateArgs, master_seed: u64, format: &str) -> Result<()> {
    if args.support == 0 || args.support > args.n {
        bail!("support must lie in [1, n]");
    }
    let tau = parse_rational(&args.tau)?;
    let mut cfg = SupportConfig::default();
    if let Some(v) = args.c_cmp {
        cfg.c_cmp = v;
    }
    if let Some(v) = args.c_probe {
        cfg.c_probe = v;
    }
    if let Some(v) = args.c_u {
        cfg.c_u = v;
    }
    if let Some(v) = args.c_na {
        cfg.c_na = v;
    }
    if let Some(v) = args.theta {
        cfg.theta = v;
    }
    let ground_truth =
        Arc::new(PiecewiseDistribution::uniform_on(args.n, args.support, None)?);

    let records: Vec<TrialRecord> = (0..args.trials)
        .into_par_iter()
        .map(|trial| -> Result<TrialRecord> {
            let derived_seed = derive_seed(master_seed, trial);
            let mut oracle = CondOracle::new(ground_truth.clone(), derived_seed);
            let t0 = Instant::now();
            let est = if args.nonadaptive {
                let m_rep = nonadaptive_repetitions(args.n, &cfg);
                let plan =
                    nonadaptive_query_plan(args.n, derive_seed(derived_seed, 1), m_rep);
                estimate_support_nonadaptive(&mut oracle, &plan, cfg.theta, &cfg)?
            } else {
                estimate_support_checked(&ground_truth, &mut oracle, args.eps, &tau, &cfg)?
            };
            let omega = ground_truth.support_size();
            Ok(TrialRecord {
                trial_index: trial,
                derived_seed,
                true_support: omega,
                estimate: est.value,
                success: est.value >= omega as f64 / (1.0 + args.eps)
                    && est.value <= (1.0 + args.eps) * omega as f64,
                queries_used: est.queries_used,
                contract_void: est.contract_void,
                wall_time_ms: t0.elapsed().as_secs_f64() * 1e3,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut records = records;
    records.sort_by_key(|r| r.trial_index);
    debug_assert!(records
        .iter()
        .all(|r| r.success == r.recompute_success(args.eps)));
    write_records(&args.out, &records, format)
        .with_context(|| format!("writing {}", args.out.display()))?;

    let config = json!({
        "command": "estimate",
        "n": args.n,
        "support": args.support,
        "eps": args.eps,
        "tau": args.tau,
        "trials": args.trials,
        "master_seed": master_seed,
        "nonadaptive": args.nonadaptive,
        "constants": {
            "c_cmp": cfg.c_cmp,
            "c_probe": cfg.c_probe,
            "c_u": cfg.c_u,
            "c_na": cfg.c_na,
            "theta": cfg.theta,
            "na_eps": cfg.na_eps,
            "na_delta": cfg.na_delta,
        },
        "format": format,
    });
    let summary = summarize(config, &records, args.nonadaptive);
    let spath = summary_path(&args.out);
    write_json(&spath, &summary)?;
    println!(
        "{} trials: success {}/{} ({:.3}, wilson [{:.3}, {:.3}]), mean queries {:.0}",
        summary.trials,
        summary.successes,
        summary.trials,
        summary.success_fraction,
        summary.wilson_low,
        summary.wilson_high,
        summary.mean_queries
    );
    println!("records: {}; summary: {}", args.out.display(), spath.display());
    Ok(())
}

fn check(args: &CheckArgs, seed: u64) -> Result<u8> {
    let outcome = match args.which.as_str() {
        "tv" => checks::check_tv(args.n, args.count.unwrap_or(100), seed),
        "hitting" => checks::check_hitting(
            args.log_n,
            args.beta,
            args.q,
            args.count.unwrap_or(50),
            args.ratio_threshold,
            seed,
        ),
        "lemmaA1" => checks::check_lemma_a1(args.count.unwrap_or(1000), args.resolution, seed),
        "counting" => checks::check_counting(args.count.unwrap_or(100), seed),
        "atoms" => checks::check_atoms(args.count.unwrap_or(200), seed),
        "fact54" => checks::check_fact54(args.count.unwrap_or(100), seed),
        other => bail!(
            "unknown check {other:?}: expected one of tv, hitting, lemmaA1, counting, atoms, fact54"
        ),
    };
    for line in &outcome.lines {
        println!("{line}");
    }
    if outcome.passed {
        println!("check {}: all assertions passed", args.which);
        Ok(0)
    } else {
        println!("check {}: FAILED", args.which);
        Ok(1)
    }
}
