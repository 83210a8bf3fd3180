//! The `buyer-privacy` command line.
//!
//! Every subcommand writes its primary outputs (CSV tables, intent JSON)
//! into `--out` and a `summary.json` that also carries wall-clock time.
//! Primary outputs depend only on the inputs and the seed.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::allocation::{allocate, AllocationConfig, AllocationMethod, InitSampling};
use crate::attacks::{assess_purchase, AttackerKnowledge, PValueConfig, PurchaseSet};
use crate::domain::adult::{case_study_intent_size1, case_study_intent_size2};
use crate::domain::{DataSpace, Dataset, Intent, LoadOptions, SyntheticParams};
use crate::error::{Error, Result};
use crate::expansion::{expand, write_trace_csv, ExpansionConfig};
use crate::harness::{
    project_dimension, render_sweep_table, reproduce_table, run_expansion_experiment, sweep,
    write_csv, DatasetSource, ExperimentConfig, ReproduceOptions, SweepParam, TableOutput, Variant,
};

#[derive(Debug, Parser)]
#[command(name = "buyer-privacy", version, about = "Protect a data buyer's intent in a data market")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Grow a true intent into a λ-private published intent.
    Expand(ExpandArgs),
    /// Build a purchase set that resists purchased-record inference.
    Allocate(AllocateArgs),
    /// Evaluate the purchased-record inference attack on a purchase.
    Attack(AttackArgs),
    /// Generate a synthetic dataset over the Adult-shaped space.
    Synth(SynthArgs),
    /// Drop one dimension and recheck (and repair) a published intent.
    Project(ProjectArgs),
    /// Expand once per grid value of λ, α or true-intent size.
    Sweep(SweepArgs),
    /// Regenerate one of the case-study tables.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// `adult`, `synth`, or a CSV path (needs --schema).
    #[arg(long, default_value = "adult")]
    pub dataset: String,
    /// Schema JSON for a CSV dataset.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Seed for `--dataset synth`.
    #[arg(long, default_value_t = 42)]
    pub synth_seed: u64,
}

#[derive(Debug, Args)]
pub struct ExpansionArgs {
    #[arg(long, default_value = "pi-uniform")]
    pub attack: AttackerKnowledge,
    #[arg(long, default_value_t = 0.3)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Intent JSON, or `ti1` / `ti2` for the Adult case-study intents.
    #[arg(long, default_value = "ti1")]
    pub intent: String,
    #[command(flatten)]
    pub expansion: ExpansionArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PValueArg {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Args)]
pub struct AllocateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value = "ti1")]
    pub intent: String,
    /// Published intent JSON; by default the true intent is expanded
    /// against the EM-f attack with --alpha.
    #[arg(long)]
    pub published: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long)]
    pub method: AllocationMethod,
    #[arg(long)]
    pub q: u64,
    #[arg(long, default_value_t = 0.3)]
    pub lambda: f64,
    /// p-value used by the feasibility check.
    #[arg(long, value_enum, default_value = "exact")]
    pub pvalue: PValueArg,
    /// Simulated multisets per Monte-Carlo p-value.
    #[arg(long = "L", default_value_t = 100_000)]
    pub l: u64,
    #[arg(long = "Z", default_value_t = 100_000)]
    pub z: u64,
    #[arg(long, default_value_t = 0.001)]
    pub epsilon: f64,
    #[arg(long = "T", default_value_t = 50)]
    pub t: usize,
    #[arg(long = "R", default_value_t = 10)]
    pub r: usize,
    #[arg(long = "W", default_value_t = 30)]
    pub w: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Draw initial purchases uniformly over populated cells.
    #[arg(long)]
    pub uniform_init: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KnowledgeArg {
    /// The attacker sees only the purchase.
    None,
    /// The attacker also knows the data distribution.
    Dist,
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Purchase CSV: one column per dimension plus `__count`.
    #[arg(long)]
    pub purchased: PathBuf,
    #[arg(long, value_enum, default_value = "dist")]
    pub knowledge: KnowledgeArg,
    #[arg(long = "L", default_value_t = 100_000)]
    pub l: u64,
    /// Use the exact binomial tail instead of simulation.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000.0)]
    pub freq_mean: f64,
    #[arg(long, default_value_t = 300.0)]
    pub freq_std: f64,
    #[arg(long, default_value_t = 20.0)]
    pub cost_mean: f64,
    #[arg(long, default_value_t = 5.0)]
    pub cost_std: f64,
    #[arg(long, default_value_t = 1.0)]
    pub cost_floor: f64,
    /// Output dataset CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the schema JSON here.
    #[arg(long)]
    pub schema_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value = "ti2")]
    pub intent: String,
    /// Published intent JSON; by default the expansion of the true intent.
    #[arg(long)]
    pub published: Option<PathBuf>,
    /// Dimension to remove; repeat or omit to project each in turn.
    #[arg(long)]
    pub drop: Vec<String>,
    #[command(flatten)]
    pub expansion: ExpansionArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value = "ti1")]
    pub intent: String,
    /// `lambda`, `alpha` or `ti-size:<dimension>`.
    #[arg(long)]
    pub param: SweepParam,
    /// Comma-separated grid values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub grid: Vec<f64>,
    #[command(flatten)]
    pub expansion: ExpansionArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub table: u8,
    #[arg(long, default_value_t = 0.3)]
    pub lambda: f64,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "Z", default_value_t = 100_000)]
    pub z: u64,
    #[arg(long, default_value_t = 42)]
    pub synth_seed: u64,
    /// Allocation settings to run (e.g. `adult-ti1,adult-ti2`).
    #[arg(long, value_delimiter = ',')]
    pub settings: Option<Vec<String>>,
    /// Purchase size override for the allocation table.
    #[arg(long)]
    pub q: Option<u64>,
    /// Published intent override (JSON, Adult space) for the allocation table.
    #[arg(long)]
    pub published: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

impl DataArgs {
    fn source(&self) -> Result<DatasetSource> {
        Ok(match self.dataset.as_str() {
            "adult" => DatasetSource::Adult,
            "synth" | "synthetic" => DatasetSource::Synthetic(SyntheticParams {
                seed: self.synth_seed,
                ..SyntheticParams::default()
            }),
            path => {
                let schema = self.schema.as_ref().ok_or_else(|| {
                    Error::Config("a CSV dataset needs --schema".into())
                })?;
                DatasetSource::File {
                    path: PathBuf::from(path),
                    schema: DataSpace::from_json(&fs::read_to_string(schema)?)?,
                    options: LoadOptions::default(),
                }
            }
        })
    }

    fn load(&self) -> Result<Dataset> {
        self.source()?.load()
    }
}

impl ExpansionArgs {
    fn config(&self) -> ExpansionConfig {
        ExpansionConfig::new(self.lambda, self.alpha, self.attack)
    }
}

fn load_intent(name: &str, space: &DataSpace) -> Result<Intent> {
    match name {
        "ti1" => case_study_intent_size1(space),
        "ti2" => case_study_intent_size2(space),
        path => Intent::from_json(space, &fs::read_to_string(path)?),
    }
}

fn create(path: &Path) -> Result<fs::File> {
    Ok(fs::File::create(path)?)
}

fn out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Runs one command; the caller turns errors into JSON and an exit code.
pub fn run(cli: Cli) -> Result<()> {
    let start = Instant::now();
    match cli.command {
        Command::Expand(a) => cmd_expand(a, start),
        Command::Allocate(a) => cmd_allocate(a, start),
        Command::Attack(a) => cmd_attack(a, start),
        Command::Synth(a) => cmd_synth(a, start),
        Command::Project(a) => cmd_project(a, start),
        Command::Sweep(a) => cmd_sweep(a, start),
        Command::Reproduce(a) => cmd_reproduce(a, start),
    }
}

/// `{"kind": ..., "message": ...}` for a failed command.
pub fn error_json(e: &Error) -> String {
    json!({ "kind": e.kind(), "message": e.to_string() }).to_string()
}

fn cmd_expand(a: ExpandArgs, start: Instant) -> Result<()> {
    let data = a.data.load()?;
    let ti = load_intent(&a.intent, data.space())?;
    let cfg = a.expansion.config();
    let x = expand(&data, &ti, &cfg)?;
    out_dir(&a.out)?;
    fs::write(a.out.join("published_intent.json"), x.published.to_json(data.space()) + "\n")?;
    write_trace_csv(&x.trace, create(&a.out.join("trace.csv"))?)?;
    let rows = run_expansion_experiment(&ExperimentConfig {
        setting: a.data.dataset.clone(),
        data: data.clone(),
        true_intent: ti,
        variants: vec![Variant {
            attack: cfg.attack,
            lambda: cfg.lambda,
            alpha: cfg.alpha,
        }],
    })?;
    write_csv(&rows, create(&a.out.join("report.csv"))?)?;
    let pi = data.records_in_intent(&x.published);
    let summary = json!({
        "attack": cfg.attack.name(),
        "lambda": cfg.lambda,
        "alpha": cfg.alpha,
        "confidence_lower_bound": x.bounds.lower,
        "confidence_upper_bound": x.bounds.upper,
        "records_pi": pi.count,
        "total_cost": pi.total_cost,
        "pi_size": x.published.cartesian_size() as u64,
        "iterations": x.trace.len(),
        "elapsed_seconds": start.elapsed().as_secs_f64(),
    });
    write_json(&a.out.join("summary.json"), &summary)?;
    println!("{summary}");
    Ok(())
}

fn cmd_allocate(a: AllocateArgs, start: Instant) -> Result<()> {
    let data = a.data.load()?;
    let ti = load_intent(&a.intent, data.space())?;
    let published = match &a.published {
        Some(p) => Intent::from_json(data.space(), &fs::read_to_string(p)?)?,
        None => {
            let cfg = ExpansionConfig::new(a.lambda, a.alpha, AttackerKnowledge::EM_F);
            expand(&data, &ti, &cfg)?.published
        }
    };
    let mut cfg = AllocationConfig::new(a.method, a.q, a.lambda);
    cfg.z = a.z;
    cfg.epsilon = a.epsilon;
    cfg.population = a.t;
    cfg.elite = a.r;
    cfg.generations = a.w;
    cfg.seed = a.seed;
    cfg.pvalue = match a.pvalue {
        PValueArg::Exact => PValueConfig::exact(),
        PValueArg::MonteCarlo => PValueConfig::monte_carlo(a.l, a.seed),
    };
    if a.uniform_init {
        cfg.init = InitSampling::UniformCells;
    }
    let alloc = allocate(&published, &ti, &data, &cfg)?;
    out_dir(&a.out)?;
    alloc
        .purchase
        .write_csv(data.space(), create(&a.out.join("purchase.csv"))?)?;
    write_csv(&flatten_report(&alloc.report), create(&a.out.join("feasibility.csv"))?)?;
    fs::write(a.out.join("published_intent.json"), published.to_json(data.space()) + "\n")?;
    let summary = json!({
        "method": a.method.name(),
        "q": a.q,
        "lambda": a.lambda,
        "utility": alloc.utility,
        "ti_records": alloc.ti_records,
        "confidence_upper_bound": alloc.confidence_upper_bound,
        "elapsed_seconds": alloc.elapsed_seconds,
        "total_seconds": start.elapsed().as_secs_f64(),
    });
    write_json(&a.out.join("summary.json"), &summary)?;
    println!("{summary}");
    Ok(())
}

#[derive(Serialize)]
struct FeasibilityLine {
    cell: String,
    count: u64,
    f_d_pi: f64,
    p_value: f64,
    confidence: f64,
}

fn flatten_report(report: &[crate::allocation::TiCellReport]) -> Vec<FeasibilityLine> {
    report
        .iter()
        .map(|r| FeasibilityLine {
            cell: r.cell.join("|"),
            count: r.count,
            f_d_pi: r.f_d_pi,
            p_value: r.p_value,
            confidence: r.confidence,
        })
        .collect()
}

fn cmd_attack(a: AttackArgs, start: Instant) -> Result<()> {
    let data = a.data.load()?;
    let space = data.space();
    let purchase = PurchaseSet::load_csv(fs::File::open(&a.purchased)?, space)?;
    let cfg = if a.exact {
        PValueConfig::exact()
    } else {
        PValueConfig::monte_carlo(a.l, a.seed)
    };
    let knows = matches!(a.knowledge, KnowledgeArg::Dist);
    let rows = assess_purchase(&purchase, space, knows.then_some(&data), &cfg)?;
    out_dir(&a.out)?;
    let mut w = csv::Writer::from_writer(create(&a.out.join("assessment.csv"))?);
    let mut header: Vec<String> = space.dimensions().iter().map(|d| d.name.clone()).collect();
    header.extend(["f_P", "f_D_PI", "p_value", "confidence"].map(String::from));
    w.write_record(&header)?;
    let opt = |x: Option<f64>| x.map_or_else(String::new, |v| v.to_string());
    for r in &rows {
        let mut rec: Vec<String> = space
            .dimensions()
            .iter()
            .map(|d| r.cell[&d.name].clone())
            .collect();
        rec.extend([r.f_p.to_string(), opt(r.f_d_pi), opt(r.p_value), r.confidence.to_string()]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    write_json(&a.out.join("assessment.json"), &rows)?;
    let max_conf = rows.iter().map(|r| r.confidence).fold(0.0, f64::max);
    let summary = json!({
        "knowledge": if knows { "dist" } else { "none" },
        "q": purchase.q(),
        "distinct_cells": purchase.distinct_cells(),
        "max_confidence": max_conf,
        "elapsed_seconds": start.elapsed().as_secs_f64(),
    });
    write_json(&a.out.join("summary.json"), &summary)?;
    println!("{summary}");
    Ok(())
}

fn cmd_synth(a: SynthArgs, start: Instant) -> Result<()> {
    let params = SyntheticParams {
        freq_mean: a.freq_mean,
        freq_std: a.freq_std,
        cost_mean: a.cost_mean,
        cost_std: a.cost_std,
        cost_floor: a.cost_floor,
        seed: a.seed,
    };
    let data = DatasetSource::Synthetic(params).load()?;
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    data.write_csv(create(&a.out)?)?;
    if let Some(s) = &a.schema_out {
        fs::write(s, data.space().to_json() + "\n")?;
    }
    println!(
        "{}",
        json!({
            "cells": data.entries().count(),
            "total_count": data.total_count(),
            "elapsed_seconds": start.elapsed().as_secs_f64(),
        })
    );
    Ok(())
}

fn cmd_project(a: ProjectArgs, start: Instant) -> Result<()> {
    let data = a.data.load()?;
    let ti = load_intent(&a.intent, data.space())?;
    let cfg = a.expansion.config();
    let published = match &a.published {
        Some(p) => Intent::from_json(data.space(), &fs::read_to_string(p)?)?,
        None => expand(&data, &ti, &cfg)?.published,
    };
    let dims: Vec<String> = if a.drop.is_empty() {
        data.space().dimensions().iter().map(|d| d.name.clone()).collect()
    } else {
        a.drop.clone()
    };
    let rows = dims
        .iter()
        .map(|d| project_dimension(&data, &ti, &published, d, &cfg))
        .collect::<Result<Vec<_>>>()?;
    out_dir(&a.out)?;
    write_csv(&rows, create(&a.out.join("projection.csv"))?)?;
    print!("{}", TableOutput::Projection(rows).render());
    write_json(
        &a.out.join("summary.json"),
        &json!({ "attack": cfg.attack.name(), "elapsed_seconds": start.elapsed().as_secs_f64() }),
    )
}

fn cmd_sweep(a: SweepArgs, start: Instant) -> Result<()> {
    let data = a.data.load()?;
    let ti = load_intent(&a.intent, data.space())?;
    let points = sweep(&data, &ti, &a.expansion.config(), &a.param, &a.grid)?;
    out_dir(&a.out)?;
    write_csv(&points, create(&a.out.join("sweep.csv"))?)?;
    print!("{}", render_sweep_table(&points));
    write_json(
        &a.out.join("summary.json"),
        &json!({
            "param": a.param.to_string(),
            "points": points.len(),
            "errors": points.iter().filter(|p| p.error.is_some()).count(),
            "elapsed_seconds": start.elapsed().as_secs_f64(),
        }),
    )
}

fn cmd_reproduce(a: ReproduceArgs, start: Instant) -> Result<()> {
    let published = match &a.published {
        Some(p) => Some(Intent::from_json(
            &crate::domain::adult_space(),
            &fs::read_to_string(p)?,
        )?),
        None => None,
    };
    let opts = ReproduceOptions {
        lambda: a.lambda,
        repeats: a.repeats,
        seed: a.seed,
        z: a.z,
        synthetic: SyntheticParams {
            seed: a.synth_seed,
            ..SyntheticParams::default()
        },
        settings: a.settings.clone(),
        q: a.q,
        published,
    };
    let out = reproduce_table(a.table, &opts)?;
    out_dir(&a.out)?;
    out.write_csv(create(&a.out.join(format!("table{}.csv", a.table)))?)?;
    print!("{}", out.render());
    let timings: Vec<_> = match &out {
        TableOutput::Allocation(rows) => rows
            .iter()
            .map(|r| {
                json!({
                    "setting": r.setting,
                    "method": r.method,
                    "elapsed_mean": r.elapsed_mean,
                    "elapsed_std": r.elapsed_std,
                })
            })
            .collect(),
        _ => Vec::new(),
    };
    write_json(
        &a.out.join("summary.json"),
        &json!({
            "table": a.table,
            "timings": timings,
            "elapsed_seconds": start.elapsed().as_secs_f64(),
        }),
    )
}
