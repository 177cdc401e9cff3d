//! Batch front end: a JSON run config plus dotted overrides in, a results
//! envelope and CSV artifacts out.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use log::info;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use rfo_core::cases::{
    ald_optimize_on, ald_simulate_on, battery_evaluate, battery_solve, battery_solve_on, diffusion_epsilon,
    diffusion_pareto, diffusion_solve, AldConfig, BatteryConfig, BatteryPolicy, DiffusionConfig, DiffusionSolution,
};
use rfo_core::grf::{sample_field, FieldEnsemble};
use rfo_core::grid::GridDomain;
use rfo_core::kernels::{Kernel, KernelFamily, MeanSpec};
use rfo_core::measures::{count_upcrossings, cvar_field, mc_excursion_probability, mc_expected_ec, per_sample_max, rice_expected_upcrossings};
use rfo_core::transcription::euler_maruyama;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Sample,
    Measure,
    SimulateSde,
    Battery,
    Ald,
    Diffusion,
    Pareto,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Measure => "measure",
            Command::SimulateSde => "simulate-sde",
            Command::Battery => "battery",
            Command::Ald => "ald",
            Command::Diffusion => "diffusion",
            Command::Pareto => "pareto",
        }
    }

    /// Config block the command reads.
    fn block(self) -> &'static str {
        match self {
            Command::Sample | Command::Measure => "field",
            Command::SimulateSde => "sde",
            Command::Battery => "battery",
            Command::Ald => "ald",
            Command::Diffusion | Command::Pareto => "diffusion",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "rfo", version, about = "Random field optimization toolkit")]
pub struct Cli {
    /// Command to run; may instead be given as `command` in the config.
    #[arg(value_enum)]
    pub command: Option<Command>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Dotted-path override, e.g. `battery.samples=50`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub lower: f64,
    pub upper: f64,
    pub points: usize,
}

fn zero_mean() -> MeanSpec {
    MeanSpec::constant(0.0)
}

fn default_alpha() -> f64 {
    0.9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldBlock {
    pub kernel: Kernel,
    #[serde(default = "zero_mean")]
    pub mean: MeanSpec,
    pub domain: Vec<AxisSpec>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureBlock {
    pub thresholds: Vec<f64>,
    /// CVaR level applied to the per-sample maxima.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

/// dy = (a·y + b) dt + noise dW.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SdeBlock {
    pub y0: f64,
    pub a: f64,
    pub b: f64,
    pub noise: f64,
    pub t_end: f64,
    pub steps: usize,
    pub paths: usize,
}

impl Default for SdeBlock {
    fn default() -> Self {
        SdeBlock { y0: 0.0, a: 0.0, b: 0.0, noise: 1.0, t_end: 1.0, steps: 100, paths: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub verbose: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sde: Option<SdeBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub battery: Option<BatteryConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ald: Option<AldConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diffusion: Option<DiffusionConfig>,
    /// Multiplier for the single-point `diffusion` command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad config, bad parameters, I/O.
    Domain(String),
    /// Solver or simulation breakdown.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Domain(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<rfo_core::error::Error> for CliError {
    fn from(e: rfo_core::error::Error) -> Self {
        use rfo_core::error::Error as E;
        match e {
            E::Solver(_) | E::Simulation(_) | E::Invariant(_) => CliError::Numerical(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

fn domain(msg: impl Into<String>) -> CliError {
    CliError::Domain(msg.into())
}

/// Set `key` (dot separated) in `root` to `raw`, parsed as JSON when it is
/// valid JSON and kept as a string otherwise.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| domain(format!("override `{assignment}` is not of the form key=value")))?;
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(domain(format!("override key `{key}` is malformed")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (depth, part) in parts.iter().enumerate() {
        let last = depth + 1 == parts.len();
        node = match node {
            Value::Object(map) => {
                if last {
                    map.insert(part.to_string(), value);
                    return Ok(());
                }
                map.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()))
            }
            Value::Array(items) => {
                let i: usize = part
                    .parse()
                    .map_err(|_| domain(format!("override `{key}`: `{part}` indexes an array")))?;
                let len = items.len();
                let slot = items
                    .get_mut(i)
                    .ok_or_else(|| domain(format!("override `{key}`: index {i} out of range ({len})")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(domain(format!("override `{key}`: `{part}` is below a scalar"))),
        };
    }
    unreachable!("loop returns on the last segment")
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => {
                let _ = write!(out, "{index}");
            }
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

/// Deserialize with schema errors reported at their JSON-pointer path.
pub fn parse_config(value: Value) -> Result<RunConfig, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let ptr = json_pointer(e.path());
        domain(format!("config error at {ptr}: {}", e.into_inner()))
    })
}

/// Merge file, overrides and flags into the effective config.
pub fn effective_config(cli: &Cli) -> Result<(Command, RunConfig), CliError> {
    let mut value = match &cli.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| domain(format!("reading {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| domain(format!("{} is not valid JSON: {e}", p.display())))?
        }
        None => Value::Object(Map::new()),
    };
    if !value.is_object() {
        return Err(domain("config error at /: expected an object"));
    }
    for o in &cli.overrides {
        apply_override(&mut value, o)?;
    }
    let mut cfg = parse_config(value)?;
    let command = match (cli.command, cfg.command) {
        (Some(a), Some(b)) if a != b => {
            return Err(domain(format!("command `{}` conflicts with config command `{}`", a.name(), b.name())))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(domain("no command given")),
    };
    cfg.command = Some(command);
    if let Some(s) = cli.seed {
        cfg.seed = Some(s);
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    cfg.verbose |= cli.verbose;
    let seed = cfg.seed.ok_or_else(|| domain(format!("command `{}` is stochastic and needs a seed", command.name())))?;
    let missing = || domain(format!("config error at /{}: block required by command `{}`", command.block(), command.name()));
    match command {
        Command::Sample | Command::Measure => {
            cfg.field.as_ref().ok_or_else(missing)?;
            if command == Command::Measure && cfg.measure.is_none() {
                return Err(domain("config error at /measure: block required by command `measure`"));
            }
        }
        Command::SimulateSde => {
            cfg.sde.as_ref().ok_or_else(missing)?;
        }
        Command::Battery => cfg.battery.as_mut().ok_or_else(missing)?.seed = seed,
        Command::Ald => cfg.ald.as_mut().ok_or_else(missing)?.seed = seed,
        Command::Diffusion | Command::Pareto => cfg.diffusion.as_mut().ok_or_else(missing)?.seed = seed,
    }
    if command == Command::Diffusion && cfg.lambda.is_none() {
        return Err(domain("config error at /lambda: required by command `diffusion`"));
    }
    Ok((command, cfg))
}

/// Results envelope written to `results.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope {
    pub tool_version: String,
    pub command: String,
    pub config: Value,
    pub metrics: Value,
    pub artifacts: Vec<String>,
}

struct Artifacts {
    dir: PathBuf,
    names: Vec<String>,
}

impl Artifacts {
    fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), CliError> {
        let mut text = header.join(",");
        text.push('\n');
        for r in rows {
            text.push_str(&r.join(","));
            text.push('\n');
        }
        self.raw(name, &text)
    }

    fn raw(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, text).map_err(|e| domain(format!("writing {}: {e}", path.display())))?;
        self.names.push(name.to_string());
        Ok(())
    }
}

/// Shortest round-trip decimal.
fn num(v: f64) -> String {
    format!("{v}")
}

fn grid_of(axes: &[AxisSpec]) -> Result<GridDomain, CliError> {
    let spec: Vec<(f64, f64, usize)> = axes.iter().map(|a| (a.lower, a.upper, a.points)).collect();
    Ok(GridDomain::uniform(&spec)?)
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 { v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (m, var)
}

/// Long-format rows `coords..., value` over every grid point.
fn long_rows(grid: &GridDomain, values: &[f64]) -> Vec<Vec<String>> {
    (0..grid.len())
        .map(|i| {
            let mut r: Vec<String> = grid.point(i).into_iter().map(num).collect();
            r.push(num(values[i]));
            r
        })
        .collect()
}

/// Run a parsed invocation; returns the envelope written to disk.
pub fn run(cli: &Cli) -> Result<Envelope, CliError> {
    let (command, cfg) = effective_config(cli)?;
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("rfo-out"));
    fs::create_dir_all(&out).map_err(|e| domain(format!("creating {}: {e}", out.display())))?;
    let mut art = Artifacts { dir: out.clone(), names: Vec::new() };
    info!("running {} with seed {}", command.name(), cfg.seed.unwrap_or_default());
    let metrics = match command {
        Command::Sample => cmd_sample(&cfg, &mut art)?,
        Command::Measure => cmd_measure(&cfg, &mut art)?,
        Command::SimulateSde => cmd_sde(&cfg, &mut art)?,
        Command::Battery => cmd_battery(&cfg, &mut art)?,
        Command::Ald => cmd_ald(&cfg, &mut art)?,
        Command::Diffusion => cmd_diffusion(&cfg, &mut art)?,
        Command::Pareto => cmd_pareto(&cfg, &mut art)?,
    };
    let config = serde_json::to_value(&cfg).map_err(|e| domain(e.to_string()))?;
    let mut artifacts = art.names;
    artifacts.push("results.json".into());
    let env = Envelope { tool_version: TOOL_VERSION.into(), command: command.name().into(), config, metrics, artifacts };
    let mut text = serde_json::to_string_pretty(&env).map_err(|e| domain(e.to_string()))?;
    text.push('\n');
    write_file(&out.join("results.json"), &text)?;
    Ok(env)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| domain(format!("writing {}: {e}", path.display())))
}

fn field_ensemble(cfg: &RunConfig) -> Result<(FieldBlock, FieldEnsemble), CliError> {
    let f = cfg.field.clone().expect("checked in effective_config");
    let grid = grid_of(&f.domain)?;
    let ens = sample_field(&f.kernel, &f.mean, &grid, f.samples, cfg.seed.unwrap_or_default())?;
    Ok((f, ens))
}

fn cmd_sample(cfg: &RunConfig, art: &mut Artifacts) -> Result<Value, CliError> {
    let (_, ens) = field_ensemble(cfg)?;
    art.raw("samples.csv", &ens.to_csv())?;
    let all: Vec<f64> = ens.samples().iter().flatten().copied().collect();
    let (m, v) = mean_sd(&all);
    Ok(json!({
        "seed": ens.seed(),
        "samples": ens.len(),
        "points": ens.points(),
        "pooled_mean": m,
        "pooled_variance": v,
    }))
}

fn cmd_measure(cfg: &RunConfig, art: &mut Artifacts) -> Result<Value, CliError> {
    let (f, ens) = field_ensemble(cfg)?;
    let mb = cfg.measure.clone().expect("checked in effective_config");
    if mb.thresholds.is_empty() {
        return Err(domain("config error at /measure/thresholds: need at least one threshold"));
    }
    let grid = ens.domain().clone();
    let one_d = grid.dim() == 1;
    // Rice applies to stationary SE fields with constant mean on an interval
    let rice_params = match (&f.kernel.family, &f.mean, one_d) {
        (KernelFamily::SquaredExponential, MeanSpec::Constant { value }, true) => {
            Some((f.kernel.sigma, f.kernel.sigma / (f.kernel.beta * f.kernel.beta), *value))
        }
        _ => None,
    };
    let length = grid.axis(0).upper() - grid.axis(0).lower();
    let mut rows = Vec::new();
    let mut per_u = Vec::new();
    for &u in &mb.thresholds {
        let p = mc_excursion_probability(&ens, u);
        let ec = if grid.dim() <= 2 { Some(mc_expected_ec(&ens, u)?) } else { None };
        let up = if one_d {
            let total: usize = ens.samples().iter().map(|s| count_upcrossings(s, u)).collect::<Result<Vec<_>, _>>()?.iter().sum();
            Some(total as f64 / ens.len() as f64)
        } else {
            None
        };
        let rice = match rice_params {
            Some((s2, lam, mu)) => Some(rice_expected_upcrossings(s2, lam, u - mu)? * length),
            None => None,
        };
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        rows.push(vec![num(u), num(p), opt(ec), opt(up), opt(rice)]);
        per_u.push(json!({ "u": u, "excursion_probability": p, "expected_ec": ec, "mean_upcrossings": up, "rice": rice }));
    }
    art.csv("measures.csv", &["u", "excursion_probability", "expected_ec", "mean_upcrossings", "rice"], rows)?;
    let maxima = per_sample_max(&ens);
    art.csv("maxima.csv", &["sample", "max"], maxima.iter().enumerate().map(|(k, m)| vec![k.to_string(), num(*m)]))?;
    let cvar = cvar_field(&maxima, mb.alpha)?;
    Ok(json!({ "seed": ens.seed(), "samples": ens.len(), "thresholds": per_u, "alpha": mb.alpha, "cvar_max": cvar }))
}

fn cmd_sde(cfg: &RunConfig, art: &mut Artifacts) -> Result<Value, CliError> {
    let s = cfg.sde.clone().expect("checked in effective_config");
    if s.steps == 0 || s.paths == 0 || s.t_end.is_nan() || s.t_end <= 0.0 {
        return Err(domain("config error at /sde: steps, paths and t_end must be positive"));
    }
    let times: Vec<f64> = (0..=s.steps).map(|i| s.t_end * i as f64 / s.steps as f64).collect();
    let (a, b, noise) = (s.a, s.b, s.noise);
    let path = euler_maruyama(move |y, _, f| f[0] = a * y[0] + b, move |_| noise, &[s.y0], &times, s.paths, cfg.seed.unwrap_or_default())?;
    let mut rows = Vec::with_capacity(s.paths * times.len());
    for k in 0..s.paths {
        for (i, t) in times.iter().enumerate() {
            rows.push(vec![k.to_string(), num(*t), num(path.state(k, i)[0])]);
        }
    }
    art.csv("paths.csv", &["path", "t", "y"], rows)?;
    let end: Vec<f64> = (0..s.paths).map(|k| path.terminal(k)[0]).collect();
    let (m, v) = mean_sd(&end);
    Ok(json!({ "seed": path.seed, "paths": s.paths, "terminal_mean": m, "terminal_variance": v }))
}

fn cmd_battery(cfg: &RunConfig, art: &mut Artifacts) -> Result<Value, CliError> {
    let bc = cfg.battery.clone().expect("checked in effective_config");
    let (det, _) = battery_solve(&bc, true)?;
    info!("deterministic battery: z_b = {}, {} iterations", det.z_b, det.iterations);
    let prices = bc.prices(false)?;
    let sto = battery_solve_on(&bc, &prices)?;
    info!("stochastic battery: z_b = {}, {} iterations", sto.z_b, sto.iterations);
    let fixed = battery_evaluate(&bc, det.z_b, &BatteryPolicy::Fixed(det.y_g[0].clone()), &prices)?;
    let recourse = battery_evaluate(&bc, det.z_b, &BatteryPolicy::Recourse, &prices)?;
    let savings = (fixed.expected_cost - sto.expected_cost) / fixed.expected_cost;
    let k = prices.len();
    let n = det.times.len();
    let mean_of = |m: &Vec<Vec<f64>>, i: usize| m.iter().map(|r| r[i]).sum::<f64>() / m.len() as f64;
    let rows = (0..n).map(|i| {
        let price = (0..k).map(|s| prices.value(s, i)).sum::<f64>() / k as f64;
        vec![
            num(det.times[i]),
            num(price),
            num(det.y_g[0][i]),
            num(det.y_b[0][i]),
            num(mean_of(&sto.y_g, i)),
            num(mean_of(&sto.y_b, i)),
        ]
    });
    art.csv("battery_policy.csv", &["t", "price_mean", "y_g_det", "y_b_det", "y_g_stoch_mean", "y_b_stoch_mean"], rows)?;
    let rows = (0..k).map(|s| {
        vec![s.to_string(), num(sto.sample_costs[s]), num(fixed.sample_costs[s]), num(recourse.sample_costs[s])]
    });
    art.csv("battery_costs.csv", &["sample", "stochastic", "deterministic_fixed", "deterministic_recourse"], rows)?;
    Ok(json!({
        "seed": bc.seed,
        "samples": k,
        "deterministic": { "z_b": det.z_b, "expected_cost": det.expected_cost, "iterations": det.iterations, "status": det.status },
        "stochastic": { "z_b": sto.z_b, "expected_cost": sto.expected_cost, "iterations": sto.iterations, "status": sto.status },
        "deterministic_fixed_cost": fixed.expected_cost,
        "deterministic_recourse_cost": recourse.expected_cost,
        "savings": savings,
    }))
}

fn cmd_ald(cfg: &RunConfig, art: &mut Artifacts) -> Result<Value, CliError> {
    let ac = cfg.ald.clone().expect("checked in effective_config");
    let field = ac.field(false)?;
    let det_field = ac.field(true)?;
    let det = ald_optimize_on(&ac, &det_field, true)?;
    info!("deterministic ald: z_p = {}", det.z_p);
    let sto = ald_optimize_on(&ac, &field, false)?;
    info!("stochastic ald: z_p = {}", sto.z_p);
    let scan = det
        .scan
        .iter()
        .map(|(z, e)| vec!["deterministic".to_string(), num(*z), num(*e)])
        .chain(sto.scan.iter().map(|(z, e)| vec!["stochastic".to_string(), num(*z), num(*e)]));
    art.csv("ald_scan.csv", &["mode", "z_p", "tracking_error"], scan)?;
    let sim = ald_simulate_on(&ac, &field, sto.z_p)?;
    let cells = sim.times.len() * sim.positions.len();
    let k = sim.coverage.len() as f64;
    let mean: Vec<f64> = (0..cells).map(|i| sim.coverage.iter().map(|c| c[i]).sum::<f64>() / k).collect();
    let grid = GridDomain::new(vec![
        rfo_core::grid::Axis::from_coords(sim.times.clone())?,
        rfo_core::grid::Axis::from_coords(sim.positions.clone())?,
    ])?;
    art.csv("ald_coverage.csv", &["t", "x", "value"], long_rows(&grid, &mean))?;
    let rel = (sto.z_p - det.z_p).abs() / det.z_p.abs().max(f64::MIN_POSITIVE);
    Ok(json!({
        "seed": ac.seed,
        "deterministic": { "z_p": det.z_p, "tracking_error": det.tracking_error },
        "stochastic": { "z_p": sto.z_p, "tracking_error": sto.tracking_error },
        "relative_difference": rel,
    }))
}

fn diffusion_grid(dc: &DiffusionConfig) -> Result<GridDomain, CliError> {
    Ok(dc.grid()?)
}

fn solution_json(s: &DiffusionSolution) -> Value {
    serde_json::to_value(s).unwrap_or(Value::Null)
}

fn cmd_diffusion(cfg: &RunConfig, art: &mut Artifacts) -> Result<Value, CliError> {
    let dc = cfg.diffusion.clone().expect("checked in effective_config");
    let lambda = cfg.lambda.expect("checked in effective_config");
    let field = dc.field()?;
    let sol = diffusion_solve(&dc, &field, lambda)?;
    info!("diffusion at lambda {lambda}: tracking {}, probability {}", sol.tracking, sol.probability);
    let grid = diffusion_grid(&dc)?;
    art.csv("diffusion_policy.csv", &["t", "x1", "x2", "value"], long_rows(&grid, &sol.policy))?;
    art.csv("diffusion_temperature.csv", &["t", "x1", "x2", "value"], long_rows(&grid, &sol.mean_temperature))?;
    Ok(json!({ "seed": dc.seed, "solution": solution_json(&sol) }))
}

fn failed_point(epsilon: f64, error: String) -> DiffusionSolution {
    DiffusionSolution {
        lambda: f64::NAN,
        status: None,
        tracking: epsilon,
        relaxed_probability: f64::NAN,
        probability: f64::NAN,
        indicator_probability: f64::NAN,
        min_temperature: f64::NAN,
        error: Some(error),
        policy: Vec::new(),
        mean_temperature: Vec::new(),
    }
}

fn cmd_pareto(cfg: &RunConfig, art: &mut Artifacts) -> Result<Value, CliError> {
    let dc = cfg.diffusion.clone().expect("checked in effective_config");
    let field = dc.field()?;
    let mut points: Vec<(&str, DiffusionSolution)> =
        diffusion_pareto(&dc, &field, &dc.lambdas)?.into_iter().map(|s| ("sweep", s)).collect();
    for p in &points {
        info!("lambda {}: tracking {}, probability {}", p.1.lambda, p.1.tracking, p.1.probability);
    }
    for &eps in &dc.epsilons {
        let s = match diffusion_epsilon(&dc, &field, eps) {
            Ok(s) => s,
            // an unreachable ε is reported as a failed point
            Err(e) if e.is_numerical() => failed_point(eps, e.to_string()),
            Err(e) => return Err(e.into()),
        };
        info!("epsilon {eps}: lambda {}, probability {}", s.lambda, s.probability);
        points.push(("epsilon", s));
    }
    let failed = points.iter().filter(|p| p.1.error.is_some()).count();
    if failed == points.len() && !points.is_empty() {
        return Err(CliError::Numerical("every Pareto point failed".into()));
    }
    let mut ok: Vec<&DiffusionSolution> = points.iter().map(|p| &p.1).filter(|s| s.error.is_none()).collect();
    ok.sort_by(|a, b| a.tracking.total_cmp(&b.tracking).then(a.lambda.total_cmp(&b.lambda)));
    let monotone = ok.windows(2).all(|w| w[1].probability <= w[0].probability);
    let rows = points.iter().map(|(src, s)| {
        vec![
            src.to_string(),
            num(s.lambda),
            num(s.tracking),
            num(s.probability),
            num(s.relaxed_probability),
            num(s.indicator_probability),
            s.status.map(|x| format!("{x:?}")).unwrap_or_else(|| "failed".into()),
        ]
    });
    art.csv(
        "pareto.csv",
        &["source", "lambda", "epsilon", "probability", "relaxed_probability", "indicator_probability", "status"],
        rows,
    )?;
    let frontier: Vec<Value> = points.iter().map(|p| solution_json(&p.1)).collect();
    Ok(json!({ "seed": dc.seed, "samples": dc.samples, "monotone": monotone, "failed": failed, "frontier": frontier }))
}

/// JSON-lines logger on standard error.
pub fn init_logging(verbose: bool) {
    let level = if verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format(|buf, record| {
            use std::io::Write;
            let line = json!({ "level": record.level().as_str().to_lowercase(), "target": record.target(), "msg": record.args().to_string() });
            writeln!(buf, "{line}")
        })
        .try_init();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_create_and_replace() {
        let mut v = json!({ "battery": { "samples": 3 }, "field": { "domain": [{ "points": 2 }] } });
        apply_override(&mut v, "battery.samples=50").unwrap();
        apply_override(&mut v, "ald.t_end=2.5").unwrap();
        apply_override(&mut v, "field.domain.0.points=7").unwrap();
        apply_override(&mut v, "out=some/dir").unwrap();
        assert_eq!(v["battery"]["samples"], json!(50));
        assert_eq!(v["ald"]["t_end"], json!(2.5));
        assert_eq!(v["field"]["domain"][0]["points"], json!(7));
        assert_eq!(v["out"], json!("some/dir"));
        assert!(apply_override(&mut v, "novalue").is_err());
        assert!(apply_override(&mut v, "battery.samples.x=1").is_err());
        assert!(apply_override(&mut v, "a..b=1").is_err());
    }

    #[test]
    fn unknown_keys_reported_with_pointer() {
        let err = parse_config(json!({ "battery": { "sampels": 3 } })).unwrap_err();
        assert!(err.to_string().contains("/battery"), "{err}");
        let err = parse_config(json!({ "field": { "kernel": { "family": "matern", "sigam": 1 }, "domain": [], "samples": 1 } })).unwrap_err();
        assert!(err.to_string().contains("/field/kernel"), "{err}");
        let err = parse_config(json!({ "sde": { "steps": "many" } })).unwrap_err();
        assert!(err.to_string().contains("/sde/steps"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn numbers_use_shortest_round_trip() {
        assert_eq!(num(0.1), "0.1");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(1e-7).parse::<f64>().unwrap(), 1e-7);
        assert_eq!(num(f64::NAN), "NaN");
    }

    #[test]
    fn numerical_failures_exit_two() {
        use rfo_core::error::Error;
        assert_eq!(CliError::from(Error::Solver("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(Error::Simulation("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(Error::Parameter("x".into())).exit_code(), 1);
    }

    fn cli(cmd: Option<Command>) -> Cli {
        Cli { command: cmd, config: None, overrides: vec![], out: None, seed: None, verbose: false }
    }

    #[test]
    fn seed_and_blocks_are_required() {
        let mut c = cli(Some(Command::Battery));
        c.overrides = vec!["battery={}".into()];
        assert!(effective_config(&c).unwrap_err().to_string().contains("seed"));
        c.seed = Some(4);
        let (cmd, cfg) = effective_config(&c).unwrap();
        assert_eq!(cmd, Command::Battery);
        assert_eq!(cfg.battery.unwrap().seed, 4);
        let mut c = cli(Some(Command::Ald));
        c.seed = Some(1);
        assert!(effective_config(&c).unwrap_err().to_string().contains("/ald"));
        assert!(effective_config(&cli(None)).is_err());
        let mut c = cli(Some(Command::Ald));
        c.overrides = vec!["command=battery".into(), "seed=1".into(), "ald={}".into()];
        assert!(effective_config(&c).unwrap_err().to_string().contains("conflicts"));
    }
}
