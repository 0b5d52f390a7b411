//! Command-line front end: table validation, reduction, embedding,
//! simulation, offline optimum, lower-bound generators and sweeps.
//!
//! Exit codes: 0 on success, 1 on validation or input failure, 2 when a
//! computation exceeds its budget.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use kmpmd::adversary::{generate_repeated, AdversaryConfig, Construction, DEFAULT_DELTA};
use kmpmd::delaymatch::{audit_trace, simulate, Request};
use kmpmd::embedding::{frt_embed, measure_distortion};
use kmpmd::gmetrics::{classify_with, CheckOptions, Family, DEFAULT_CHECK_BUDGET};
use kmpmd::harness::{run_competitive_suite, run_lowerbound_suite, run_pipeline, CompetitiveParams, LowerBoundParams};
use kmpmd::oracle::{opt_offline_table, DEFAULT_OPT_BUDGET};
use kmpmd::reduction::{induce_pairwise, verify_sandwich};
use kmpmd::{requests_from_json, requests_to_json, HMetricTable, PairwiseMetric, TreeMetric};
use serde_json::json;

#[derive(Parser)]
#[command(name = "kmpmd", version, about = "k-way min-cost perfect matching with delays")]
struct Cli {
    /// Seed for every randomized stage.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (directory for `adversary`); stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Work budget for axiom checks and the offline optimum search.
    #[arg(long, global = true)]
    budget: Option<u128>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a table belongs to a family (exit 1 if not).
    Validate {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value = "H_metric", value_parser = parse_family)]
        family: Family,
    },
    /// Report every applicable axiom and the resulting families.
    Classify {
        #[arg(long)]
        table: PathBuf,
    },
    /// Induce the pairwise metric of an H-metric and check the sandwich bounds.
    Reduce {
        #[arg(long)]
        table: PathBuf,
    },
    /// Embed a pairwise metric (or the one induced by a table) into a tree.
    Embed(EmbedArgs),
    /// Run the timer algorithm on a tree.
    Simulate {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        requests: PathBuf,
        /// Group size; defaults to the table's arity.
        #[arg(long)]
        k: Option<usize>,
        /// Table for charging matches in the original space.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Write the event log as JSON lines.
        #[arg(long)]
        events: Option<PathBuf>,
    },
    /// Exact offline optimum for a small instance.
    Opt {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        requests: PathBuf,
    },
    /// Emit a lower-bound instance: table.json, requests.json and manifest.json.
    Adversary {
        #[command(flatten)]
        construction: ConstructionArgs,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        tau: f64,
        /// Independent sequences to concatenate.
        #[arg(long, default_value_t = 1)]
        repeat: usize,
    },
    /// Exact strategy minimum against expected optimum, one CSV row per r.
    Lowerbound {
        #[command(flatten)]
        construction: ConstructionArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<usize>,
        /// Defaults to 1/max(r, 4).
        #[arg(long)]
        tau: Option<f64>,
        /// Sampled sequences whose optimum is recomputed per r.
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
    /// Empirical ratio against the offline optimum on random instances.
    Compete {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Requests per instance (a multiple of k).
        #[arg(long, default_value_t = 9)]
        requests: usize,
        /// Seeds `seed .. seed + trials`.
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 1.0)]
        envelope_c: f64,
        /// Also write one CSV row per instance.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Reduce, embed, simulate and compare with the optimum.
    Pipeline {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        requests: PathBuf,
        /// Skip the offline optimum.
        #[arg(long)]
        no_opt: bool,
    },
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long, conflicts_with = "table", required_unless_present = "table")]
    metric: Option<PathBuf>,
    #[arg(long)]
    table: Option<PathBuf>,
    /// Keep unary chains.
    #[arg(long)]
    no_contract: bool,
    /// Report distortion over this many seeds instead of emitting a tree.
    #[arg(long)]
    stats: Option<u64>,
}

#[derive(Args)]
struct ConstructionArgs {
    #[arg(long, value_parser = parse_construction)]
    construction: Construction,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
}

impl ConstructionArgs {
    fn k(&self) -> usize {
        self.k.unwrap_or(self.construction.default_k())
    }
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    serde_json::from_value(json!(s))
        .map_err(|_| format!("unknown family `{s}` (two_metric, D_metric, G_metric, n_metric, K_metric, H_metric)"))
}

fn parse_construction(s: &str) -> std::result::Result<Construction, String> {
    s.parse().map_err(|e: kmpmd::Error| e.to_string())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_table(path: &Path) -> Result<HMetricTable> {
    HMetricTable::from_json(&read(path)?).with_context(|| format!("parsing table {}", path.display()))
}

/// Writes to a sibling temporary file first so a failed run leaves no
/// partial output behind.
fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, content).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, content),
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{}", content.trim_end()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => Ok(r?),
            }
        }
    }
}

fn to_csv<T: serde::Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Outcome of a command that ran to completion but found the input invalid.
struct Rejected;

fn run(cli: Cli) -> Result<std::result::Result<(), Rejected>> {
    let out = cli.out.as_deref();
    let check = CheckOptions { budget: cli.budget.unwrap_or(DEFAULT_CHECK_BUDGET) };
    let opt_budget = cli.budget.unwrap_or(DEFAULT_OPT_BUDGET);
    match cli.command {
        Command::Validate { table, family } => {
            let t = load_table(&table)?;
            let c = classify_with(&t, &check)?;
            let required =
                family.axioms(t.k()).with_context(|| format!("{family} is not defined for k = {}", t.k()))?;
            let failures: Vec<_> = c
                .reports
                .iter()
                .filter(|r| required.contains(&r.axiom) && !r.holds)
                .map(|r| {
                    json!({
                        "axiom": r.axiom.name(),
                        "witness": r.witness.as_ref().map(|w| w.describe(t.points())),
                    })
                })
                .collect();
            let ok = failures.is_empty();
            emit(out, &serde_json::to_string_pretty(&json!({ "family": family, "valid": ok, "failures": failures }))?)?;
            return Ok(if ok { Ok(()) } else { Err(Rejected) });
        }
        Command::Classify { table } => {
            let t = load_table(&table)?;
            let c = classify_with(&t, &check)?;
            let reports: Vec<_> = c
                .reports
                .iter()
                .map(|r| {
                    json!({
                        "axiom": r.axiom.name(),
                        "holds": r.holds,
                        "witness": r.witness.as_ref().map(|w| w.describe(t.points())),
                        "tightest": r.tightest.as_ref().map(|w| w.describe(t.points())),
                        "evaluations": r.evaluations,
                    })
                })
                .collect();
            emit(out, &serde_json::to_string_pretty(&json!({ "families": c.families, "axioms": reports }))?)?;
        }
        Command::Reduce { table } => {
            let t = load_table(&table)?;
            let p = induce_pairwise(&t)?;
            let s = verify_sandwich(&t, &p)?;
            emit(out, &serde_json::to_string_pretty(&json!({ "metric": p.to_file(), "sandwich": s }))?)?;
        }
        Command::Embed(args) => {
            let metric = match (&args.metric, &args.table) {
                (Some(m), _) => PairwiseMetric::from_json(&read(m)?)?,
                (None, Some(t)) => induce_pairwise(&load_table(t)?)?,
                (None, None) => bail!("either --metric or --table is required"),
            };
            if let Some(n) = args.stats {
                let seeds: Vec<u64> = (cli.seed..cli.seed + n).collect();
                emit(out, &serde_json::to_string_pretty(&measure_distortion(&metric, &seeds)?)?)?;
            } else {
                let raw = frt_embed(&metric, cli.seed)?;
                let tree = if args.no_contract { raw } else { raw.contract_height() };
                emit(out, &tree.to_json()?)?;
            }
        }
        Command::Simulate { tree, requests, k, table, events } => {
            let tree = TreeMetric::from_json(&read(&tree)?)?;
            let table = table.as_deref().map(load_table).transpose()?;
            let k = match (k, &table) {
                (Some(k), _) => k,
                (None, Some(t)) => t.k(),
                (None, None) => bail!("--k is required without --table"),
            };
            let reqs = requests_from_json(&read(&requests)?, tree.points())?;
            let on_tree = reqs.iter().map(|r| Request::on_tree(&tree, r)).collect::<kmpmd::Result<Vec<_>>>()?;
            let (cost, trace) = simulate(&tree, &on_tree, k, table.as_ref())?;
            let audit = audit_trace(&tree, &trace, None);
            if let Some(p) = events {
                write_atomic(&p, &trace.events_jsonl()?)?;
            }
            let body = json!({ "cost": cost, "matches": trace.matches, "timers": trace.timers, "audit": audit });
            emit(out, &serde_json::to_string_pretty(&body)?)?;
        }
        Command::Opt { table, requests } => {
            let t = load_table(&table)?;
            let reqs = requests_from_json(&read(&requests)?, t.points())?;
            emit(out, &serde_json::to_string_pretty(&opt_offline_table(&t, &reqs, opt_budget)?)?)?;
        }
        Command::Adversary { construction, r, tau, repeat } => {
            let dir = out.context("--out DIR is required for adversary")?;
            let cfg = AdversaryConfig {
                construction: construction.construction,
                r,
                tau,
                k: construction.k(),
                eps: construction.eps,
                delta: construction.delta,
                seed: cli.seed,
            };
            let (inst, phases) = generate_repeated(&cfg, repeat)?;
            let manifest = json!({
                "config": cfg,
                "repeat": repeat,
                "termination_phases": phases,
                "p1": inst.p1.iter().map(|&p| inst.table.points().label(p)).collect::<Vec<_>>(),
                "p2": inst.p2.iter().map(|&p| inst.table.points().label(p)).collect::<Vec<_>>(),
                "requests": inst.requests.len(),
            });
            let files = [
                ("table.json", inst.table.to_json()?),
                ("requests.json", requests_to_json(&inst.requests, inst.table.points())?),
                ("manifest.json", serde_json::to_string_pretty(&manifest)?),
            ];
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (name, content) in &files {
                write_atomic(&dir.join(name), content)?;
            }
        }
        Command::Lowerbound { construction, r, tau, trials } => {
            let params = LowerBoundParams {
                construction: construction.construction,
                k: construction.k(),
                eps: construction.eps,
                delta: construction.delta,
                tau,
                trials,
                seed: cli.seed,
                opt_budget,
            };
            emit(out, &to_csv(&run_lowerbound_suite(&params, &r)?)?)?;
        }
        Command::Compete { n, k, requests, trials, envelope_c, records } => {
            let params = CompetitiveParams {
                k,
                requests,
                seeds: (cli.seed..cli.seed + trials).collect(),
                opt_budget,
                envelope_c,
            };
            let (rows, summary) = run_competitive_suite(&params, &n)?;
            let summary_csv = to_csv(&summary)?;
            if let Some(p) = records {
                write_atomic(&p, &to_csv(&rows)?)?;
            }
            emit(out, &summary_csv)?;
        }
        Command::Pipeline { table, requests, no_opt } => {
            let t = load_table(&table)?;
            let reqs = requests_from_json(&read(&requests)?, t.points())?;
            let run = run_pipeline(&t, &reqs, cli.seed, (!no_opt).then_some(opt_budget))?;
            emit(out, &serde_json::to_string_pretty(&run.record)?)?;
        }
    }
    Ok(Ok(()))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Rejected)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let budget = e.chain().any(|c| c.downcast_ref::<kmpmd::Error>().is_some_and(kmpmd::Error::is_budget));
            ExitCode::from(if budget { 2 } else { 1 })
        }
    }
}
