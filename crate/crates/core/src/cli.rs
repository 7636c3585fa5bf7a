//! Batch commands behind the `rnet` binary.
//!
//! Every command resolves its configuration up front, computes, and returns
//! a [`Report`]: a CSV table and a JSON summary. Both carry the tool version
//! and a SHA-256 hash of the resolved configuration, and contain nothing
//! time- or host-dependent, so a fixed configuration reproduces them byte
//! for byte.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{usage, Error, Result};
use crate::estimators::{
    branch_entropy_bound, branch_weights_idealized, branch_weights_model, dsuff, entropy_estimate, BranchWeights,
    EstimateInputs, LogBase,
};
use crate::liouville::{ModelSpec, TimeGrid};
use crate::models::{model_to_string, parse_model, preset};
use crate::network::{
    build_rn, coarse_grain, compress, contract_system, mutual_information, tail_cut, two_point_correlation,
    ReservoirNetwork, Trajectory, TruncationPolicy,
};
use crate::oracle::{evolve_exact, evolve_trotter_dense, InteractionMode};
use crate::tensor::trace_distance;

pub const TOOL_NAME: &str = "rnet";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// The `d_suff` quoted for the two-term, `γT = 1`, `γτ = 0.2` example.
pub const QUOTED_DSUFF: f64 = 1000.0;

#[derive(Debug, Parser)]
#[command(name = "rnet", version, about = "Reservoir-network simulator and effective-dimension estimator")]
pub struct Cli {
    /// Directory for `<command>.csv` and `<command>.json`; stdout if absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Reduced system trajectory from the reservoir network.
    Simulate(SimulateArgs),
    /// Per-step errors of the network and the dense oracles against each other.
    Compare(CompareArgs),
    /// Bond entropies of the compressed network against the dimension estimate.
    EntropyProfile(ProfileArgs),
    /// Trajectory error and bond dimension over a range of cutoffs.
    TruncateScan(ScanArgs),
    /// Closed-form entropy and sufficient reservoir dimension.
    Dsuff(DsuffArgs),
    /// Enumerated branch weights and their entropy.
    BranchEntropy(BranchArgs),
    /// Mutual information between time windows and tail-cut errors.
    MiDecay(MiArgs),
    /// Merges time sites and compares with a network built on the coarse grid.
    CoarseGrain(CoarseArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Model file (JSON).
    #[arg(long, conflicts_with = "preset")]
    pub model: Option<PathBuf>,
    /// Named preset.
    #[arg(long)]
    pub preset: Option<String>,
    /// Preset parameter override, `KEY=VALUE`; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Seed for presets built from random matrices.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.02)]
    pub tau: f64,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TruncArgs {
    #[arg(long, default_value_t = 1e-8)]
    pub cutoff: f64,
    #[arg(long)]
    pub max_bond: Option<usize>,
}

impl TruncArgs {
    fn policy(&self) -> TruncationPolicy {
        TruncationPolicy { cutoff: self.cutoff, max_bond: self.max_bond, renormalize: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum LogBaseArg {
    #[value(name = "e")]
    #[serde(rename = "e")]
    E,
    #[value(name = "10")]
    #[serde(rename = "10")]
    Ten,
}

impl From<LogBaseArg> for LogBase {
    fn from(b: LogBaseArg) -> Self {
        match b {
            LogBaseArg::E => LogBase::Natural,
            LogBaseArg::Ten => LogBase::Base10,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Compress the network at this cutoff before contracting.
    #[arg(long)]
    pub cutoff: Option<f64>,
    #[arg(long)]
    pub max_bond: Option<usize>,
    /// Add the trace distance to the dense factorised evolution.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub trunc: TruncArgs,
    #[arg(long, value_enum, default_value = "e")]
    pub log_base: LogBaseArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScanArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_delimiter = ',', default_value = "0,1e-10,1e-8,1e-6,1e-4,1e-2")]
    pub cutoffs: Vec<f64>,
    #[arg(long)]
    pub max_bond: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DsuffArgs {
    /// Number of interaction terms.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Memory length `T`.
    #[arg(long, default_value_t = 1.0)]
    pub memory_time: f64,
    /// Minimal reservoir time scale.
    #[arg(long, default_value_t = 0.2)]
    pub tau_min: f64,
    #[arg(long, value_enum, default_value = "e")]
    pub log_base: LogBaseArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchMode {
    Idealized,
    Model,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BranchArgs {
    #[arg(long, value_enum, default_value = "idealized")]
    pub mode: BranchMode,
    /// Interaction terms (idealized mode).
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// `γτ` (idealized mode).
    #[arg(long, default_value_t = 0.1)]
    pub gamma_tau: f64,
    /// Number of sites `K`.
    #[arg(long, default_value_t = 2)]
    pub steps: usize,
    /// Step for model mode.
    #[arg(long, default_value_t = 0.05)]
    pub tau: f64,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MiArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub trunc: TruncArgs,
    /// Sites per window.
    #[arg(long, default_value_t = 1)]
    pub window: usize,
    /// Largest start-to-start separation.
    #[arg(long, default_value_t = 6)]
    pub max_separation: usize,
    /// First site of the earlier window; defaults to a quarter of the run.
    #[arg(long)]
    pub anchor: Option<usize>,
    /// Memory length is read off where MI falls below this fraction of its first value.
    #[arg(long, default_value_t = 0.1)]
    pub threshold: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CoarseArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Fine grid.
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 2)]
    pub block: usize,
}

/// Output of one command.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub csv: String,
    pub summary: Value,
}

impl Report {
    pub fn summary_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary).expect("summary serialises");
        s.push('\n');
        s
    }

    /// Writes `<command>.csv` and `<command>.json` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{}.csv", self.command)), &self.csv)?;
        std::fs::write(dir.join(format!("{}.json", self.command)), self.summary_text())?;
        Ok(())
    }
}

/// Plain decimal in the usual range, exponent notation outside it. Both
/// forms round-trip exactly.
fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn render(&self, command: &str, hash: &str) -> Result<String> {
        let mut out = format!("# tool: {TOOL_NAME} {TOOL_VERSION}\n# command: {command}\n# config_sha256: {hash}\n");
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let to_io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(&self.header).map_err(to_io)?;
        for row in &self.rows {
            w.write_record(row).map_err(to_io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
        Ok(out)
    }
}

fn resolve_model(args: &ModelArgs) -> Result<ModelSpec> {
    match (&args.model, &args.preset) {
        (Some(path), None) => {
            if !args.params.is_empty() || args.seed.is_some() {
                return usage("--param and --seed apply to presets only");
            }
            parse_model(path)
        }
        (None, Some(name)) => {
            let mut params = BTreeMap::new();
            for kv in &args.params {
                let Some((k, v)) = kv.split_once('=') else {
                    return usage(format!("--param expects KEY=VALUE, got '{kv}'"));
                };
                let v: f64 =
                    v.trim().parse().map_err(|_| Error::Usage(format!("--param {k}: '{v}' is not a number")))?;
                params.insert(k.trim().to_string(), v);
            }
            if let Some(seed) = args.seed {
                params.insert("seed".into(), seed as f64);
            }
            preset(name, &params)
        }
        (None, None) => usage("one of --model or --preset is required"),
        (Some(_), Some(_)) => usage("--model and --preset are mutually exclusive"),
    }
}

fn config_hash(command: &Command, model: Option<&ModelSpec>) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_string(command).expect("config serialises"));
    if let Some(m) = model {
        h.update(model_to_string(m));
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn model_summary(m: &ModelSpec) -> Value {
    json!({ "d_S": m.d_s(), "d_R": m.d_r(), "n_terms": m.n_terms(), "gamma": m.gamma() })
}

fn estimate_json(n: usize, gamma: f64, memory_time: f64, tau_min: f64, base: LogBase) -> Value {
    match EstimateInputs::new(n, gamma, memory_time, tau_min, base) {
        Ok(inputs) => {
            let d = dsuff(&inputs).expect("validated inputs");
            let full = entropy_estimate(&inputs, true).expect("validated inputs");
            json!({
                "T": memory_time,
                "tau_min": tau_min,
                "log_base": base,
                "entropy_simplified": d.entropy_s,
                "entropy_full_nats": full,
                "d_suff": d.d_suff,
                "warnings": inputs.warnings(),
            })
        }
        Err(e) => json!({ "unavailable": e.to_string() }),
    }
}

fn rn_trajectory(model: &ModelSpec, grid: &TimeGrid, policy: Option<TruncationPolicy>) -> Result<(Trajectory, usize)> {
    let rn = build_rn(model, grid)?;
    let rn = match policy {
        Some(p) => compress(&rn, &p)?.0,
        None => rn,
    };
    Ok((contract_system(&rn, model, grid)?, rn.max_bond_dim()))
}

fn simulate(a: &SimulateArgs, model: &ModelSpec) -> Result<(Table, Value)> {
    let grid = TimeGrid::new(a.grid.tau, a.grid.steps)?;
    let policy = (a.cutoff.is_some() || a.max_bond.is_some()).then(|| TruncationPolicy {
        cutoff: a.cutoff.unwrap_or(0.0),
        max_bond: a.max_bond,
        renormalize: false,
    });
    let (traj, bond) = rn_trajectory(model, &grid, policy)?;
    let oracle = if a.oracle {
        let dense = evolve_trotter_dense(model, &grid, InteractionMode::Factorized)?.trajectory;
        Some(traj.trace_distances(&dense)?)
    } else {
        None
    };
    let d = model.d_s();
    let mut header = vec!["step".to_string(), "t".to_string()];
    for i in 0..d {
        for j in 0..d {
            header.push(format!("rho_{i}_{j}_re"));
            header.push(format!("rho_{i}_{j}_im"));
        }
    }
    if oracle.is_some() {
        header.push("oracle_trace_distance".into());
    }
    let mut table = Table::new(header);
    for (k, (t, rho)) in traj.times().iter().zip(traj.states()).enumerate() {
        let mut row = vec![k.to_string(), num(*t)];
        for i in 0..d {
            for j in 0..d {
                row.push(num(rho[(i, j)].re));
                row.push(num(rho[(i, j)].im));
            }
        }
        if let Some(dist) = &oracle {
            row.push(num(dist[k]));
        }
        table.push(row);
    }
    let summary = json!({
        "model": model_summary(model),
        "tau": a.grid.tau,
        "steps": a.grid.steps,
        "max_bond_dim": bond,
        "max_oracle_trace_distance": oracle.map(|d| d.into_iter().fold(0.0, f64::max)),
    });
    Ok((table, summary))
}

fn compare(a: &CompareArgs, model: &ModelSpec) -> Result<(Table, Value)> {
    let grid = TimeGrid::new(a.grid.tau, a.grid.steps)?;
    let exact = evolve_exact(model, &grid)?.trajectory;
    let trotter = evolve_trotter_dense(model, &grid, InteractionMode::Exact)?.trajectory;
    let factorized = evolve_trotter_dense(model, &grid, InteractionMode::Factorized)?.trajectory;
    let (rn, _) = rn_trajectory(model, &grid, None)?;
    let cols =
        [rn.trace_distances(&factorized)?, factorized.trace_distances(&trotter)?, trotter.trace_distances(&exact)?];
    let names = ["rn_vs_factorized", "factorized_vs_trotter", "trotter_vs_exact"];
    let mut table = Table::new(["step", "t"].into_iter().chain(names));
    for (k, t) in grid.times().iter().enumerate() {
        let mut row = vec![k.to_string(), num(*t)];
        row.extend(cols.iter().map(|c| num(c[k])));
        table.push(row);
    }
    let mut max = serde_json::Map::new();
    let mut last = serde_json::Map::new();
    for (name, c) in names.iter().zip(&cols) {
        max.insert(name.to_string(), json!(c.iter().copied().fold(0.0, f64::max)));
        last.insert(name.to_string(), json!(c.last().copied()));
    }
    let summary = json!({
        "model": model_summary(model),
        "tau": a.grid.tau,
        "steps": a.grid.steps,
        "max": max,
        "final": last,
    });
    Ok((table, summary))
}

fn entropy_profile(a: &ProfileArgs, model: &ModelSpec) -> Result<(Table, Value)> {
    let grid = TimeGrid::new(a.grid.tau, a.grid.steps)?;
    let (rn, report) = compress(&build_rn(model, &grid)?, &a.trunc.policy())?;
    let dims = rn.bond_dims();
    let mut table = Table::new(["bond", "t", "bond_dim", "entropy", "discarded_weight"]);
    for (b, (s, e)) in report.spectra.iter().zip(&report.entropies).enumerate() {
        let bond = b + 1;
        table.push(vec![
            bond.to_string(),
            num(bond as f64 * grid.tau()),
            dims[bond].to_string(),
            num(*e),
            num(s.discarded_weight()),
        ]);
    }
    let base = LogBase::from(a.log_base);
    let summary = json!({
        "model": model_summary(model),
        "tau": a.grid.tau,
        "steps": a.grid.steps,
        "policy": { "cutoff": a.trunc.cutoff, "max_bond": a.trunc.max_bond },
        "measured": {
            "max_entropy": report.max_entropy(),
            "exp_max_entropy": report.max_entropy().exp(),
            "max_bond_dim": report.max_bond_dim,
            "total_discarded_weight": report.total_discarded_weight(),
        },
        "prediction": estimate_json(model.n_terms(), model.gamma(), grid.total_time(), grid.tau(), base),
    });
    Ok((table, summary))
}

fn truncate_scan(a: &ScanArgs, model: &ModelSpec) -> Result<(Table, Value)> {
    if a.cutoffs.is_empty() {
        return usage("--cutoffs needs at least one value");
    }
    let grid = TimeGrid::new(a.grid.tau, a.grid.steps)?;
    let rn = build_rn(model, &grid)?;
    let reference = contract_system(&rn, model, &grid)?;
    let mut table = Table::new(["cutoff", "max_bond_dim", "max_entropy", "discarded_weight", "max_trace_distance"]);
    let mut rows = Vec::new();
    for &cutoff in &a.cutoffs {
        let (c, report) = compress(&rn, &TruncationPolicy { cutoff, max_bond: a.max_bond, renormalize: false })?;
        let err = reference.max_trace_distance(&contract_system(&c, model, &grid)?)?;
        table.push(vec![
            num(cutoff),
            c.max_bond_dim().to_string(),
            num(report.max_entropy()),
            num(report.total_discarded_weight()),
            num(err),
        ]);
        rows.push(json!({ "cutoff": cutoff, "max_bond_dim": c.max_bond_dim(), "max_trace_distance": err }));
    }
    let summary = json!({
        "model": model_summary(model),
        "tau": a.grid.tau,
        "steps": a.grid.steps,
        "uncompressed_bond_dim": rn.max_bond_dim(),
        "scan": rows,
    });
    Ok((table, summary))
}

fn dsuff_cmd(a: &DsuffArgs) -> Result<(Table, Value)> {
    let selected = LogBase::from(a.log_base);
    let mut table = Table::new(["log_base", "entropy", "d_suff"]);
    let mut both = serde_json::Map::new();
    for (label, base) in [("e", LogBase::Natural), ("10", LogBase::Base10)] {
        let d = dsuff(&EstimateInputs::new(a.n, a.gamma, a.memory_time, a.tau_min, base)?)?;
        table.push(vec![label.into(), num(d.entropy_s), num(d.d_suff)]);
        both.insert(label.into(), json!({ "entropy": d.entropy_s, "d_suff": d.d_suff }));
    }
    let inputs = EstimateInputs::new(a.n, a.gamma, a.memory_time, a.tau_min, selected)?;
    let d = dsuff(&inputs)?;
    let summary = json!({
        "inputs": inputs,
        "gamma_T": a.gamma * a.memory_time,
        "gamma_tau_min": inputs.gamma_tau(),
        "selected": { "entropy": d.entropy_s, "d_suff": d.d_suff },
        "by_base": both,
        "entropy_full_nats": entropy_estimate(&inputs, true)?,
        "quoted_d_suff": QUOTED_DSUFF,
        "warnings": inputs.warnings(),
    });
    Ok((table, summary))
}

fn branch_table(w: &BranchWeights) -> Table {
    let mut table = Table::new(["branch", "string", "weight"]);
    for (j, q) in w.weights().iter().enumerate() {
        let s: Vec<String> = w.string(j).iter().map(ToString::to_string).collect();
        table.push(vec![j.to_string(), s.join("-"), num(*q)]);
    }
    table
}

fn branch_entropy(a: &BranchArgs, model: Option<&ModelSpec>) -> Result<(Table, Value)> {
    let (weights, n, gamma_tau, extra) = match (a.mode, model) {
        (BranchMode::Idealized, _) => {
            (branch_weights_idealized(a.n, a.gamma_tau, a.steps)?, a.n, a.gamma_tau, Value::Null)
        }
        (BranchMode::Model, Some(m)) => {
            let rn = build_rn(m, &TimeGrid::new(a.tau, a.steps)?)?;
            (branch_weights_model(&rn)?, m.n_terms(), m.gamma() * a.tau, model_summary(m))
        }
        (BranchMode::Model, None) => return usage("model mode needs --model or --preset"),
    };
    let enumerated = branch_entropy_bound(&weights);
    let prediction = estimate_json(n, 1.0, gamma_tau * a.steps as f64, gamma_tau, LogBase::Natural);
    let summary = json!({
        "mode": a.mode,
        "n": n,
        "gamma_tau": gamma_tau,
        "steps": a.steps,
        "model": extra,
        "branches": weights.len(),
        "weight_sum": weights.sum(),
        "measured": { "entropy": enumerated },
        "prediction": prediction,
    });
    Ok((branch_table(&weights), summary))
}

/// Memory length read off an MI curve: the first separation at which MI
/// drops below `threshold` times its first value.
fn memory_length(points: &[(usize, f64)], threshold: f64, tau: f64) -> Option<f64> {
    let first = points.first()?.1;
    points.iter().find(|(_, mi)| *mi <= threshold * first).map(|(s, _)| *s as f64 * tau)
}

fn mi_decay(a: &MiArgs, model: &ModelSpec) -> Result<(Table, Value)> {
    if a.window == 0 {
        return usage("--window must be positive");
    }
    let grid = TimeGrid::new(a.grid.tau, a.grid.steps)?;
    let rn = build_rn(model, &grid)?;
    let (compressed, _) = compress(&rn, &a.trunc.policy())?;
    let anchor = a.anchor.unwrap_or(grid.steps() / 4);
    let last_start = anchor + a.max_separation;
    if last_start + a.window > grid.steps() || a.max_separation < a.window {
        return usage(format!(
            "windows of {} sites at {anchor}..{} do not fit in {} steps without overlap",
            a.window,
            last_start + a.window,
            grid.steps()
        ));
    }
    let mut table = Table::new(["separation", "t_separation", "mutual_information"]);
    let mut points = Vec::new();
    for sep in a.window..=a.max_separation {
        let mi = mutual_information(&compressed, anchor..anchor + a.window, anchor + sep..anchor + sep + a.window)?;
        table.push(vec![sep.to_string(), num(sep as f64 * grid.tau()), num(mi)]);
        points.push((sep, mi));
    }
    let full = contract_system(&rn, model, &grid)?;
    let mut cuts = Vec::new();
    for keep in (1..=grid.steps()).step_by((grid.steps() / 10).max(1)) {
        let cut = contract_system(&tail_cut(&rn, keep)?, model, &grid)?;
        let err = trace_distance(full.final_state(), cut.final_state())?;
        cuts.push(json!({ "keep_last": keep, "final_trace_distance": err }));
    }
    let t_mem = memory_length(&points, a.threshold, grid.tau());
    let summary = json!({
        "model": model_summary(model),
        "tau": a.grid.tau,
        "steps": a.grid.steps,
        "window": a.window,
        "anchor": anchor,
        "threshold": a.threshold,
        "measured": {
            "mutual_information": points.iter().map(|(s, m)| json!({ "separation": s, "mi": m })).collect::<Vec<_>>(),
            "memory_time": t_mem,
            "tail_cut": cuts,
        },
        "prediction": t_mem.map(|t| estimate_json(model.n_terms(), model.gamma(), t, grid.tau(), LogBase::Natural)),
    });
    Ok((table, summary))
}

fn coarse(a: &CoarseArgs, model: &ModelSpec) -> Result<(Table, Value)> {
    if a.block == 0 || !a.grid.steps.is_multiple_of(a.block) {
        return usage(format!("--block {} must divide --steps {}", a.block, a.grid.steps));
    }
    let fine = TimeGrid::new(a.grid.tau, a.grid.steps)?;
    let coarse_grid = TimeGrid::new(a.grid.tau * a.block as f64, a.grid.steps / a.block)?;
    let fine_rn = build_rn(model, &fine)?;
    let merged = coarse_grain(&fine_rn, a.block)?;
    let direct = build_rn(model, &coarse_grid)?;
    let via = contract_system(&merged, model, &coarse_grid)?;
    let reference = contract_system(&direct, model, &coarse_grid)?;
    let dist = via.trace_distances(&reference)?;
    let mut table = Table::new(["step", "t", "trace_distance"]);
    for (k, t) in coarse_grid.times().iter().enumerate() {
        table.push(vec![k.to_string(), num(*t), num(dist[k])]);
    }
    let correlator = |rn: &ReservoirNetwork| -> Result<Option<f64>> {
        if rn.len() < 2 {
            return Ok(None);
        }
        Ok(Some(two_point_correlation(rn, 0, 1, rn.len() - 1, 1)?.norm()))
    };
    let summary = json!({
        "model": model_summary(model),
        "tau_fine": fine.tau(),
        "tau_coarse": coarse_grid.tau(),
        "block": a.block,
        "max_trace_distance": dist.iter().copied().fold(0.0, f64::max),
        "correlator_first_last": { "merged": correlator(&merged)?, "direct": correlator(&direct)? },
    });
    Ok((table, summary))
}

fn model_args(c: &Command) -> Option<&ModelArgs> {
    match c {
        Command::Simulate(a) => Some(&a.model),
        Command::Compare(a) => Some(&a.model),
        Command::EntropyProfile(a) => Some(&a.model),
        Command::TruncateScan(a) => Some(&a.model),
        Command::MiDecay(a) => Some(&a.model),
        Command::CoarseGrain(a) => Some(&a.model),
        Command::BranchEntropy(a) if a.mode == BranchMode::Model => Some(&a.model),
        Command::BranchEntropy(_) | Command::Dsuff(_) => None,
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Compare(_) => "compare",
            Command::EntropyProfile(_) => "entropy-profile",
            Command::TruncateScan(_) => "truncate-scan",
            Command::Dsuff(_) => "dsuff",
            Command::BranchEntropy(_) => "branch-entropy",
            Command::MiDecay(_) => "mi-decay",
            Command::CoarseGrain(_) => "coarse-grain",
        }
    }
}

/// Resolves the configuration and runs the command.
pub fn execute(command: &Command) -> Result<Report> {
    let model = model_args(command).map(resolve_model).transpose()?;
    let m = || model.as_ref().expect("model resolved for this command");
    let (table, mut summary) = match command {
        Command::Simulate(a) => simulate(a, m())?,
        Command::Compare(a) => compare(a, m())?,
        Command::EntropyProfile(a) => entropy_profile(a, m())?,
        Command::TruncateScan(a) => truncate_scan(a, m())?,
        Command::Dsuff(a) => dsuff_cmd(a)?,
        Command::BranchEntropy(a) => branch_entropy(a, model.as_ref())?,
        Command::MiDecay(a) => mi_decay(a, m())?,
        Command::CoarseGrain(a) => coarse(a, m())?,
    };
    let hash = config_hash(command, model.as_ref());
    let name = command.name();
    summary["meta"] = json!({ "tool": TOOL_NAME, "version": TOOL_VERSION, "command": name, "config_sha256": hash });
    summary["config"] = serde_json::to_value(command).expect("config serialises");
    Ok(Report { command: name.to_string(), csv: table.render(name, &hash)?, summary })
}

/// Parses `args` (program name first), runs, writes outputs and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = execute(&cli.command).and_then(|report| {
        match &cli.out {
            Some(dir) => {
                report.write_to(dir)?;
                print!("{}", report.summary_text());
            }
            None => {
                print!("{}", report.csv);
                eprint!("{}", report.summary_text());
            }
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{TOOL_NAME}: {e}");
            e.exit_code()
        }
    }
}
