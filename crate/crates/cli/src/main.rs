//! `qconsensus`: optimise, analyse and simulate swap-based quantum consensus.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 solver non-convergence,
//! 3 verification failure.

mod tables;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use qconsensus::combinatorics::{enumerate_partitions, tabloid_count, Partition};
use qconsensus::graphs::{build_family, FamilySpec, WeightVector, WeightedGraph};
use qconsensus::optimizer::{
    closed_form, complete_closed_form, cross_validate, default_group_names, objective_in, regime_of, solve_regime,
    OptimizationResult, Regime, SolverOptions, MAX_DENSE_INDUCED_VERTICES,
};
use qconsensus::quantum::{simulate, simulate_unsafe, DensityMatrix};
use qconsensus::scheme::complete_graph_optimum;
use qconsensus::schreier::induced_laplacian;
use qconsensus::spectra::{sym_eigenvalues, EIG_TOL};
use qconsensus::verify::{verify_claim, Claim};
use qconsensus::{round_sig, Exec};

#[derive(Parser)]
#[command(name = "qconsensus", version, about = "Optimal edge weights for discrete-time quantum consensus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal weights for a topology, as JSON.
    Optimize(OptimizeArgs),
    /// Induced-graph Laplacian spectra.
    Spectrum(SpectrumArgs),
    /// Randomised checks of the partition-spectrum claims.
    Verify(VerifyArgs),
    /// Density-matrix simulation: CSV trajectory plus JSON summary.
    Simulate(SimulateArgs),
    /// Closed-form tables as CSV.
    Tables(TablesArgs),
    /// Complete-graph optimum for any N and d.
    Complete(CompleteArgs),
}

/// Graph selection shared by the subcommands.
#[derive(Args, Clone, Default)]
pub struct GraphArgs {
    /// Family name, e.g. path, cycle, star, complete, paw, diamond, lollipop,
    /// ccs_star, ccs_star2, symmetric_star, palm, prism, coupled_complete.
    #[arg(long)]
    pub topology: Option<String>,
    /// Graph JSON: {"n": int, "edges": [[i, j, group], ...], "groups": int}.
    #[arg(long)]
    pub graph_file: Option<PathBuf>,
    /// Family spec as JSON, e.g. '{"family":"cartesian_product","factors":[...]}'.
    #[arg(long)]
    pub spec: Option<String>,
    /// Number of vertices (qudits).
    #[arg(long, visible_alias = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub q1: Option<usize>,
    #[arg(long)]
    pub q2: Option<usize>,
    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long)]
    pub n2: Option<usize>,
    #[arg(long)]
    pub n3: Option<usize>,
}

pub struct Resolved {
    pub graph: WeightedGraph,
    pub names: Vec<String>,
    pub spec: Option<FamilySpec>,
}

impl GraphArgs {
    pub fn family_spec(&self) -> Result<Option<FamilySpec>> {
        if let Some(text) = &self.spec {
            return Ok(Some(serde_json::from_str(text).map_err(|e| usage(format!("--spec: {e}")))?));
        }
        let Some(name) = &self.topology else { return Ok(None) };
        let mut obj = Map::new();
        obj.insert("family".into(), json!(name.replace('-', "_")));
        for (key, val) in [
            ("n", self.n),
            ("p", self.p),
            ("q", self.q),
            ("q1", self.q1),
            ("q2", self.q2),
            ("n1", self.n1),
            ("n2", self.n2),
            ("n3", self.n3),
        ] {
            if let Some(v) = val {
                obj.insert(key.into(), json!(v));
            }
        }
        let spec = serde_json::from_value::<FamilySpec>(Value::Object(obj))
            .map_err(|e| usage(format!("topology {name:?}: {e}")))?;
        Ok(Some(spec))
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let chosen = [self.topology.is_some(), self.graph_file.is_some(), self.spec.is_some()];
        if chosen.iter().filter(|&&c| c).count() != 1 {
            bail!(usage("give exactly one of --topology, --graph-file, --spec"));
        }
        let resolved = if let Some(path) = &self.graph_file {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let graph = WeightedGraph::from_json(&text)?;
            let names = default_group_names(graph.groups());
            Resolved { graph, names, spec: None }
        } else {
            let spec = self.family_spec()?.expect("checked above");
            let t = build_family(&spec)?;
            Resolved { graph: t.graph, names: t.group_names, spec: Some(spec) }
        };
        if let Some(n) = self.n {
            if n != resolved.graph.n() {
                bail!(usage(format!("--n {n} does not match the graph's {} vertices", resolved.graph.n())));
            }
        }
        Ok(resolved)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Closed,
    Generic,
    Both,
}

#[derive(Args)]
struct SolverArgs {
    /// Certified optimality gap on the SLEM.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 200_000)]
    max_iters: usize,
    /// Recorded for reproducibility; the solver is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions { tol: self.tol, max_iters: self.max_iters, seed: self.seed, allow_negative: false }
    }
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Qudit dimension.
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// le | eq | general | classical; defaults to the regime of (N, d).
    #[arg(long)]
    regime: Option<String>,
    #[arg(long, value_enum, default_value_t = Method::Generic)]
    method: Method,
    /// SLEM tolerance for --method both.
    #[arg(long, default_value_t = 1e-4)]
    check_tol: f64,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Group weights: `0.4,0.2` in group order or `w0=0.4,w1=0.2`. Default 1.
    #[arg(long)]
    weights: Option<String>,
    /// One partition such as `2,1,1`; default all partitions of N.
    #[arg(long)]
    partition: Option<String>,
    /// Also report the regime objective for this qudit dimension.
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_parser = parse_claim)]
    claim: Claim,
    #[arg(long, visible_alias = "N")]
    n: usize,
    /// Recorded in the report; the claims hold for every partition.
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// `auto` (optimal weights), a JSON file, or a list as for `spectrum`.
    #[arg(long, default_value = "auto")]
    weights: String,
    #[arg(long, default_value_t = 60)]
    steps: usize,
    /// Seed of the random initial state.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial state JSON instead of a random one.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Allow weights that break complete positivity.
    #[arg(long = "unsafe")]
    allow_unsafe: bool,
    /// Directory for trajectory.csv and summary.json.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    N4,
    Lp,
    SdpLe,
    SdpEq,
    QubitComplete,
}

#[derive(Args)]
pub struct TablesArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    /// Restrict lp/sdp tables to one topology.
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Add oracle columns from the numerical solver.
    #[arg(long)]
    pub check: bool,
    /// Largest N for qubit-complete.
    #[arg(long, default_value_t = 16)]
    pub n_max: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
struct CompleteArgs {
    #[arg(long, visible_alias = "N")]
    n: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
}

/// Input problems; they exit with code 1 like every error other than
/// non-convergence.
pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(msg.into())
}

fn parse_claim(s: &str) -> std::result::Result<Claim, String> {
    s.parse().map_err(|e: qconsensus::Error| e.to_string())
}

fn parse_regime(s: &str) -> Result<Regime> {
    Ok(s.parse::<Regime>()?)
}

/// Rounds every float to twelve significant digits.
pub fn rounded(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(rounded).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

fn print_json(v: Value) {
    println!("{}", serde_json::to_string_pretty(&rounded(v)).expect("JSON serialises"));
}

fn named(mut r: OptimizationResult, names: &[String]) -> OptimizationResult {
    r.group_names = names.to_vec();
    r
}

fn optimize(a: &OptimizeArgs) -> Result<u8> {
    let g = a.graph.resolve()?;
    let n = g.graph.n();
    let regime = match &a.regime {
        Some(r) => parse_regime(r)?,
        None => regime_of(n, a.d)?,
    };
    let opts = a.solver.options();
    match a.method {
        Method::Generic => {
            let r = named(solve_regime(&g.graph, regime, Some(a.d), &opts)?, &g.names);
            print_json(r.to_json_value());
            Ok(if r.converged { 0 } else { 2 })
        }
        Method::Closed => {
            let spec = g.spec.as_ref().ok_or_else(|| usage("--method closed needs a named topology"))?;
            let r = if regime == Regime::General && matches!(spec, FamilySpec::Complete { .. }) {
                complete_closed_form(n, a.d)?
            } else {
                closed_form(spec, regime)?
            };
            print_json(r.to_json_value());
            Ok(0)
        }
        Method::Both => {
            let spec = g.spec.as_ref().ok_or_else(|| usage("--method both needs a named topology"))?;
            let v = cross_validate(spec, regime, &opts, a.check_tol)?;
            print_json(v.to_json_value());
            Ok(0)
        }
    }
}

/// Parses `0.4,0.2` or `w0=0.4,w1=0.2`.
fn parse_weights(text: &str, names: &[String]) -> Result<WeightVector> {
    let items: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| usage(format!("bad weight {s:?}")));
    if items.iter().any(|s| s.contains('=')) {
        let mut w = vec![None; names.len()];
        for item in items {
            let (k, v) = item.split_once('=').ok_or_else(|| usage(format!("mixed weight syntax at {item:?}")))?;
            let idx = names.iter().position(|g| g == k.trim()).ok_or_else(|| usage(format!("unknown group {k:?}")))?;
            w[idx] = Some(num(v.trim())?);
        }
        let w: Option<Vec<f64>> = w.into_iter().collect();
        return Ok(WeightVector(w.ok_or_else(|| usage(format!("weights needed for every group: {names:?}")))?));
    }
    let w: Vec<f64> = items.into_iter().map(num).collect::<Result<_>>()?;
    if w.len() == 1 && names.len() > 1 {
        return Ok(WeightVector::uniform(names.len(), w[0]));
    }
    if w.len() != names.len() {
        bail!(usage(format!("{} weights given for {} groups {names:?}", w.len(), names.len())));
    }
    Ok(WeightVector(w))
}

/// Weights from a JSON object `{group: value}` (or a result with a
/// `weights` object) or an array.
fn weights_from_json(text: &str, names: &[String]) -> Result<WeightVector> {
    let v: Value = serde_json::from_str(text).map_err(|e| usage(format!("weights JSON: {e}")))?;
    let v = v.get("weights").cloned().unwrap_or(v);
    match v {
        Value::Array(a) => {
            let w: Option<Vec<f64>> = a.iter().map(Value::as_f64).collect();
            let w = w.ok_or_else(|| usage("weights array must hold numbers"))?;
            if w.len() != names.len() {
                bail!(usage(format!("{} weights given for {} groups", w.len(), names.len())));
            }
            Ok(WeightVector(w))
        }
        Value::Object(o) => {
            let w: Option<Vec<f64>> = names.iter().map(|g| o.get(g).and_then(Value::as_f64)).collect();
            Ok(WeightVector(w.ok_or_else(|| usage(format!("weights needed for every group: {names:?}")))?))
        }
        _ => bail!(usage("weights JSON must be an object or array")),
    }
}

fn parse_partition(text: &str) -> Result<Partition> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| usage(format!("bad partition {text:?}"))))
        .collect::<Result<_>>()?;
    Ok(Partition::new(parts)?)
}

fn weights_object(names: &[String], w: &WeightVector) -> Value {
    Value::Object(names.iter().cloned().zip(w.as_slice().iter().map(|x| json!(x))).collect())
}

fn spectrum(a: &SpectrumArgs) -> Result<u8> {
    let g = a.graph.resolve()?;
    let n = g.graph.n();
    let w = match &a.weights {
        Some(text) => parse_weights(text, &g.names)?,
        None => WeightVector::uniform(g.names.len(), 1.0),
    };
    let partitions = match &a.partition {
        Some(text) => {
            let p = parse_partition(text)?;
            if p.n() != n {
                bail!(usage(format!("partition {p} is not a partition of {n}")));
            }
            vec![p]
        }
        None => enumerate_partitions(n, None)?,
    };
    for p in &partitions {
        let nu = tabloid_count(p);
        if nu > MAX_DENSE_INDUCED_VERTICES as u128 {
            return Err(qconsensus::Error::Resource(format!(
                "induced graph of {p} has {nu} vertices; dense spectra are limited to {MAX_DENSE_INDUCED_VERTICES}"
            ))
            .into());
        }
    }
    let rows: Vec<Value> = Exec::default()
        .map(&partitions, |p| -> Result<Value> {
            let spec = sym_eigenvalues(&induced_laplacian(&g.graph, p, &w)?, EIG_TOL)?;
            let v = spec.values();
            Ok(json!({
                "partition": p.to_string(),
                "vertices": v.len(),
                "eigenvalues": v,
                "lambda2": v.get(1).copied(),
                "lambda_max": spec.max(),
            }))
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let mut out = json!({ "N": n, "weights": weights_object(&g.names, &w), "partitions": rows });
    if let Some(d) = a.d {
        let regime = regime_of(n, d)?;
        let (s, l2, lmax) = objective_in(&g.graph, &w, regime, Some(d))?;
        out["objective"] = json!({ "d": d, "regime": regime, "slem": s, "lambda2": l2, "lambda_max": lmax });
    }
    print_json(out);
    Ok(0)
}

fn verify(a: &VerifyArgs) -> Result<u8> {
    let report = verify_claim(a.claim, a.n, a.trials, a.seed, Exec::default())?;
    let mut v = serde_json::to_value(&report)?;
    v["d"] = json!(a.d);
    v["trials"] = json!(a.trials);
    print_json(v);
    Ok(if report.pass { 0 } else { 3 })
}

fn simulate_cmd(a: &SimulateArgs) -> Result<u8> {
    let g = a.graph.resolve()?;
    let n = g.graph.n();
    let regime = regime_of(n, a.d)?;
    let w = if a.weights == "auto" {
        let r = solve_regime(&g.graph, regime, Some(a.d), &SolverOptions::default())?;
        if !r.converged {
            return Err(qconsensus::Error::NonConvergence("optimal weights for --weights auto".into()).into());
        }
        r.weights
    } else if PathBuf::from(&a.weights).is_file() {
        weights_from_json(&fs::read_to_string(&a.weights)?, &g.names)?
    } else {
        parse_weights(&a.weights, &g.names)?
    };
    let rho0 = match &a.state {
        Some(path) => {
            let rho = DensityMatrix::from_json(
                &fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
            )?;
            if rho.n() != n || rho.d() != a.d {
                bail!(usage(format!("state is for N={}, d={}; expected N={n}, d={}", rho.n(), rho.d(), a.d)));
            }
            rho
        }
        None => DensityMatrix::random(n, a.d, a.seed)?,
    };
    let traj = if a.allow_unsafe {
        simulate_unsafe(&rho0, &g.graph, &w, a.steps)?
    } else {
        simulate(&rho0, &g.graph, &w, a.steps)?
    };
    let (predicted, _, _) = objective_in(&g.graph, &w, regime, Some(a.d))?;
    let mut summary = traj.summary(predicted, 0.02);
    summary["N"] = json!(n);
    summary["d"] = json!(a.d);
    summary["seed"] = json!(a.seed);
    summary["regime"] = json!(regime);
    summary["weights"] = weights_object(&g.names, &w);
    let summary = rounded(summary);
    fs::create_dir_all(&a.out_dir)?;
    fs::write(a.out_dir.join("trajectory.csv"), traj.to_csv())?;
    fs::write(a.out_dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(0)
}

fn complete(a: &CompleteArgs) -> Result<u8> {
    let opt = complete_graph_optimum(a.n, a.d)?;
    let mut v = serde_json::to_value(&opt)?;
    v["regime"] = json!(regime_of(a.n, a.d)?);
    print_json(v);
    Ok(0)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<qconsensus::Error>() {
        Some(qconsensus::Error::NonConvergence(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Optimize(a) => optimize(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Verify(a) => verify(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Tables(a) => tables::run(a),
        Command::Complete(a) => complete(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
