//! Command-line front end. Every command is first turned into a [`RunConfig`], which fully
//! determines the outputs, so flag runs and `run --config` runs share one code path.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::analytic::{self, Quantity, Status, UnitNorm};
use crate::error::{Error, Result};
use crate::integrate::{self, BoundaryRun, Surface, TargetKind, VolumeRun};
use crate::metrics::{MetricName, MonotoneMetric};
use crate::qstate::{FRAME_DIM, STATE_DIM};
use crate::sequences::{self, Scramble, SequenceConfig, SequenceKind};

/// Environment variable overriding the default output directory.
pub const OUT_DIR_ENV: &str = "SEPVOL_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Volume,
    Boundary,
    Sweep,
    Mc,
    Conjectures,
    Curvature,
}

/// Which of the two metric normalizations to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    /// ×4 for monotone metrics (the ledger convention), unscaled for Hilbert–Schmidt.
    Auto,
    Base,
    Tilde,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub metrics: Vec<String>,
    pub sequence: SequenceKind,
    pub scramble: Scramble,
    pub seed: u64,
    pub points: u64,
    /// Defaults to the module checkpoint interval, capped at `points`.
    pub checkpoint_every: Option<u64>,
    pub surfaces: Vec<Surface>,
    pub a_values: Vec<f64>,
    pub replications: u64,
    pub scale: Scale,
    /// Hypothesized value of `P_sep` for the replication t-statistics.
    pub null_value: f64,
    pub ricci_trials: usize,
    pub ricci_refine: usize,
    pub output_dir: PathBuf,
    /// File stem; defaults to the command name.
    pub name: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Volume,
            metrics: vec!["bures".into()],
            sequence: SequenceKind::FaureTezuka,
            scramble: Scramble::Shared,
            seed: 1,
            points: 1_000_000,
            checkpoint_every: None,
            surfaces: vec![Surface::Rank3, Surface::Rank4Sep],
            a_values: vec![1.0, 0.1, 0.01, 0.001],
            replications: 10,
            scale: Scale::Auto,
            null_value: 0.0,
            ricci_trials: 100_000,
            ricci_refine: 200,
            output_dir: default_output_dir(),
            name: None,
        }
    }
}

fn default_output_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }

    pub fn stem(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            serde_json::to_value(self.command).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
        })
    }

    pub fn resolved_metrics(&self) -> Result<Vec<MonotoneMetric>> {
        if self.metrics.is_empty() {
            return Err(Error::InvalidConfig("no metrics given".into()));
        }
        self.metrics
            .iter()
            .map(|s| {
                let name: MetricName = s.parse()?;
                let tilde = match self.scale {
                    Scale::Auto => name != MetricName::HilbertSchmidt,
                    Scale::Base => false,
                    Scale::Tilde => true,
                };
                Ok(MonotoneMetric::new(name, tilde))
            })
            .collect()
    }

    fn sequence_config(&self, dim: usize) -> SequenceConfig {
        SequenceConfig { scramble: self.scramble, ..SequenceConfig::new(self.sequence, dim, self.seed) }
    }

    fn every(&self, default: u64) -> u64 {
        self.checkpoint_every.unwrap_or(default.min(self.points.max(1)))
    }
}

/// Files written by one run, plus a one-line summary per item for the terminal.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 {
        Ok(x as u64)
    } else {
        Err(format!("`{s}` is not a nonnegative integer"))
    }
}

fn parse_from_str<T: std::str::FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScrambleArg {
    None,
    Shared,
    PerDimension,
}

impl From<ScrambleArg> for Scramble {
    fn from(s: ScrambleArg) -> Self {
        match s {
            ScrambleArg::None => Scramble::None,
            ScrambleArg::Shared => Scramble::Shared,
            ScrambleArg::PerDimension => Scramble::PerDimension,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sepvol", version, about = "Volumes, hyperareas and separability probabilities of two-qubit states")]
struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Args)]
struct Common {
    /// Metric names (bures, gks, wy, average, km, ni, maximal, hs, interp:A); repeat or comma-separate.
    #[arg(long = "metric", short, value_delimiter = ',')]
    metrics: Vec<String>,
    #[arg(long = "seq", value_parser = parse_from_str::<SequenceKind>)]
    sequence: Option<SequenceKind>,
    #[arg(long, value_enum)]
    scramble: Option<ScrambleArg>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of points; scientific notation such as 1e7 is accepted.
    #[arg(long, short = 'n', value_parser = parse_count)]
    points: Option<u64>,
    #[arg(long = "every", value_parser = parse_count)]
    checkpoint_every: Option<u64>,
    #[arg(long, value_enum)]
    scale: Option<Scale>,
    /// Output directory (overrides the environment variable).
    #[arg(long = "out")]
    output_dir: Option<PathBuf>,
    /// Output file stem.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// 15-d volumes and separability probabilities.
    Volume(Common),
    /// 14-d boundary hyperareas.
    Boundary {
        #[command(flatten)]
        common: Common,
        /// rank3, rank4-sep or rank4-all; repeat or comma-separate.
        #[arg(long = "surface", value_delimiter = ',', value_parser = parse_from_str::<Surface>)]
        surfaces: Vec<Surface>,
    },
    /// Separability probabilities along the interpolated Bures/maximal family.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long = "a", value_delimiter = ',')]
        a_values: Vec<f64>,
    },
    /// Independent Monte Carlo replications with t-statistics.
    Mc {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        replications: Option<u64>,
        /// Hypothesized separability probability.
        #[arg(long = "null")]
        null_value: Option<f64>,
    },
    /// Print and write the conjecture ledger.
    Conjectures(Common),
    /// Lévy–Gromov comparison, Ricci traces and Ricci minima.
    Curvature {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_count)]
        trials: Option<u64>,
        #[arg(long)]
        refine: Option<usize>,
    },
    /// Execute a JSON run configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn apply_common(cfg: &mut RunConfig, c: Common) {
    if !c.metrics.is_empty() {
        cfg.metrics = c.metrics;
    }
    if let Some(v) = c.sequence {
        cfg.sequence = v;
    }
    if let Some(v) = c.scramble {
        cfg.scramble = v.into();
    }
    if let Some(v) = c.seed {
        cfg.seed = v;
    }
    if let Some(v) = c.points {
        cfg.points = v;
    }
    if c.checkpoint_every.is_some() {
        cfg.checkpoint_every = c.checkpoint_every;
    }
    if let Some(v) = c.scale {
        cfg.scale = v;
    }
    if let Some(v) = c.output_dir {
        cfg.output_dir = v;
    }
    cfg.name = c.name;
}

fn config_from_cli(cmd: Cmd) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    match cmd {
        Cmd::Volume(c) => {
            cfg.command = Command::Volume;
            apply_common(&mut cfg, c);
        }
        Cmd::Boundary { common, surfaces } => {
            cfg.command = Command::Boundary;
            apply_common(&mut cfg, common);
            if !surfaces.is_empty() {
                cfg.surfaces = surfaces;
            }
        }
        Cmd::Sweep { common, a_values } => {
            cfg.command = Command::Sweep;
            apply_common(&mut cfg, common);
            if !a_values.is_empty() {
                cfg.a_values = a_values;
            }
        }
        Cmd::Mc { common, replications, null_value } => {
            cfg.command = Command::Mc;
            cfg.sequence = SequenceKind::StratifiedMc;
            cfg.metrics = vec!["maximal".into()];
            apply_common(&mut cfg, common);
            cfg.replications = replications.unwrap_or(cfg.replications);
            cfg.null_value = null_value.unwrap_or(cfg.null_value);
        }
        Cmd::Conjectures(c) => {
            cfg.command = Command::Conjectures;
            apply_common(&mut cfg, c);
        }
        Cmd::Curvature { common, trials, refine } => {
            cfg.command = Command::Curvature;
            apply_common(&mut cfg, common);
            cfg.ricci_trials = trials.map_or(cfg.ricci_trials, |t| t as usize);
            cfg.ricci_refine = refine.unwrap_or(cfg.ricci_refine);
        }
        Cmd::Run { config } => return RunConfig::from_json_file(&config),
    }
    Ok(cfg)
}

/// Parses arguments, runs, prints the summary, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = config_from_cli(cli.command).and_then(|cfg| execute_with_threads(&cfg, cli.threads));
    match result {
        Ok(out) => {
            for line in &out.summary {
                println!("{line}");
            }
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("{}", serde_json::to_string(&json!({ "error": e })).unwrap_or_default());
            1
        }
    }
}

/// Runs `cfg` on a dedicated pool of `threads` workers (the global pool when `None`).
pub fn execute_with_threads(cfg: &RunConfig, threads: Option<usize>) -> Result<RunOutput> {
    match threads {
        None => execute(cfg),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(|| execute(cfg)),
    }
}

pub fn execute(cfg: &RunConfig) -> Result<RunOutput> {
    match cfg.command {
        Command::Volume => cmd_volume(cfg),
        Command::Boundary => cmd_boundary(cfg),
        Command::Sweep => cmd_sweep(cfg),
        Command::Mc => cmd_mc(cfg),
        Command::Conjectures => cmd_conjectures(cfg),
        Command::Curvature => cmd_curvature(cfg),
    }
}

fn short(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:.6e}")
    } else {
        format!("{x:.6}")
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn file_label(metric: &MonotoneMetric) -> String {
    let s: String = metric
        .name
        .label()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' { c.to_ascii_lowercase() } else { '-' })
        .collect();
    s.trim_matches('-').to_string()
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r.iter().map(|x| x.to_string())).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn prepare_dir(cfg: &RunConfig) -> Result<()> {
    fs::create_dir_all(&cfg.output_dir)?;
    Ok(())
}

fn target_json(t: Result<analytic::Target>, estimate: f64) -> Value {
    match t {
        Ok(t) => json!({
            "estimate": num(estimate),
            "target": t.expr,
            "target_value": num(t.value),
            "status": t.status,
            "deviation": num(estimate - t.value),
            "relative_deviation": num(estimate / t.value - 1.0),
        }),
        Err(e) => json!({ "estimate": num(estimate), "target": Value::Null, "note": e.to_string() }),
    }
}

fn config_echo(cfg: &RunConfig) -> Value {
    serde_json::to_value(cfg).unwrap_or(Value::Null)
}

fn volume_report(run: &VolumeRun) -> Value {
    let f = &run.final_estimate;
    let m = &run.metric;
    json!({
        "metric": m.name.label(),
        "tilde": m.tilde,
        "final": {
            "points": f.points,
            "V_total": num(f.total),
            "V_sep": num(f.sep),
            "V_nonsep": num(f.nonsep),
            "P_sep": num(f.prob_sep()),
        },
        "targets": {
            "V_total": target_json(analytic::target_for(m, TargetKind::VTotal), f.total),
            "V_sep": target_json(analytic::target_for(m, TargetKind::VSep), f.sep),
            "V_nonsep": target_json(analytic::target_for(m, TargetKind::VNonsep), f.nonsep),
            "P_sep": target_json(analytic::target_for_quantity(m, Quantity::PSep), f.prob_sep()),
        },
        "diagnostics": run.diagnostics,
    })
}

fn cmd_volume(cfg: &RunConfig) -> Result<RunOutput> {
    let metrics = cfg.resolved_metrics()?;
    let runs = integrate::estimate_volumes(
        &metrics,
        &cfg.sequence_config(STATE_DIM),
        cfg.points,
        cfg.every(integrate::VOLUME_CHECKPOINT),
    )?;
    prepare_dir(cfg)?;
    let mut out = RunOutput::default();
    for run in &runs {
        let path = cfg.output_dir.join(format!("{}_{}.csv", cfg.stem(), file_label(&run.metric)));
        let rows: Vec<Vec<f64>> =
            run.checkpoints.iter().map(|c| vec![c.points as f64, c.total, c.sep, c.nonsep, c.prob_sep()]).collect();
        write_csv(&path, &["points", "estimate_total", "estimate_sep", "estimate_nonsep", "prob_sep"], &rows)?;
        out.files.push(path);
        let f = &run.final_estimate;
        out.summary.push(format!(
            "{}: V_total = {}, V_sep = {}, P_sep = {}",
            run.metric.name,
            short(f.total),
            short(f.sep),
            short(f.prob_sep())
        ));
    }
    let report = json!({
        "command": cfg.command,
        "seed": cfg.seed,
        "config": config_echo(cfg),
        "results": runs.iter().map(volume_report).collect::<Vec<_>>(),
    });
    let path = cfg.output_dir.join(format!("{}.json", cfg.stem()));
    write_json(&path, &report)?;
    out.files.push(path);
    Ok(out)
}

fn boundary_report(run: &BoundaryRun) -> Value {
    let f = &run.final_estimate;
    let m = &run.metric;
    let d = &run.diagnostics;
    json!({
        "metric": m.name.label(),
        "tilde": m.tilde,
        "final": {
            "points": f.points,
            "B_total": num(f.b_total),
            "B_sep": num(f.b_sep),
            "beta": num(f.beta),
            "beta_all_roots": num(f.beta_all),
            "B_sep_plus_beta": num(f.b_sep + f.beta),
        },
        "targets": {
            "B_total": target_json(analytic::target_for(m, TargetKind::BRank3Total), f.b_total),
            "B_sep": target_json(analytic::target_for(m, TargetKind::BRank3Sep), f.b_sep),
            "beta": target_json(analytic::target_for(m, TargetKind::BetaRank4Sep), f.beta),
            "B_sep_plus_beta": target_json(analytic::target_for_quantity(m, Quantity::BSepPlusBeta), f.b_sep + f.beta),
        },
        "diagnostics": d,
        "root_fraction": num(d.root_fraction()),
    })
}

fn cmd_boundary(cfg: &RunConfig) -> Result<RunOutput> {
    let metrics = cfg.resolved_metrics()?;
    if cfg.surfaces.is_empty() {
        return Err(Error::InvalidConfig("no surfaces given".into()));
    }
    let runs = integrate::estimate_boundaries(
        &metrics,
        &cfg.sequence_config(FRAME_DIM + 2),
        cfg.points,
        cfg.every(integrate::BOUNDARY_CHECKPOINT),
        &cfg.surfaces,
    )?;
    prepare_dir(cfg)?;
    let mut out = RunOutput::default();
    for run in &runs {
        let path = cfg.output_dir.join(format!("{}_{}.csv", cfg.stem(), file_label(&run.metric)));
        let rows: Vec<Vec<f64>> =
            run.checkpoints.iter().map(|c| vec![c.points as f64, c.b_total, c.b_sep, c.beta]).collect();
        write_csv(&path, &["points", "B_total", "B_sep", "beta"], &rows)?;
        out.files.push(path);
        let f = &run.final_estimate;
        out.summary.push(format!(
            "{}: B_total = {:.6}, B_sep = {:.6}, beta = {:.6}",
            run.metric.name, f.b_total, f.b_sep, f.beta
        ));
    }
    let report = json!({
        "command": cfg.command,
        "seed": cfg.seed,
        "config": config_echo(cfg),
        "results": runs.iter().map(boundary_report).collect::<Vec<_>>(),
    });
    let path = cfg.output_dir.join(format!("{}.json", cfg.stem()));
    write_json(&path, &report)?;
    out.files.push(path);
    Ok(out)
}

fn cmd_sweep(cfg: &RunConfig) -> Result<RunOutput> {
    let tilde = cfg.scale != Scale::Base;
    let rows = integrate::interpolation_sweep(&cfg.a_values, &cfg.sequence_config(STATE_DIM), cfg.points, tilde)?;
    prepare_dir(cfg)?;
    let mut out = RunOutput::default();
    let path = cfg.output_dir.join(format!("{}.csv", cfg.stem()));
    let table: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.a, r.v_total, r.v_sep, r.p_sep, r.overflow as f64]).collect();
    write_csv(&path, &["a", "estimate_total", "estimate_sep", "prob_sep", "overflow"], &table)?;
    out.files.push(path);
    for r in &rows {
        out.summary.push(format!("a = {}: P_sep = {:.6}", r.a, r.p_sep));
    }
    let decreasing = rows.windows(2).all(|w| w[0].a <= w[1].a || w[1].p_sep < w[0].p_sep);
    let report = json!({
        "command": cfg.command,
        "seed": cfg.seed,
        "config": config_echo(cfg),
        "rows": rows.iter().map(|r| json!({
            "a": num(r.a),
            "V_total": num(r.v_total),
            "V_sep": num(r.v_sep),
            "P_sep": num(r.p_sep),
            "overflow": r.overflow,
        })).collect::<Vec<_>>(),
        "p_sep_decreasing_as_a_decreases": decreasing,
    });
    let path = cfg.output_dir.join(format!("{}.json", cfg.stem()));
    write_json(&path, &report)?;
    out.files.push(path);
    Ok(out)
}

fn stats_json(values: &[f64], null: f64, null_source: &str) -> Result<Value> {
    let s = sequences::replication_stats(values, null)?;
    Ok(json!({
        "mu": num(s.mean),
        "eta": num(s.sd),
        "t": num(s.t),
        "null": num(null),
        "null_source": null_source,
        "degenerate": s.degenerate,
    }))
}

fn cmd_mc(cfg: &RunConfig) -> Result<RunOutput> {
    let metrics = cfg.resolved_metrics()?;
    let reps = integrate::replicate_volumes(&metrics, &cfg.sequence_config(STATE_DIM), cfg.replications, cfg.points)?;
    prepare_dir(cfg)?;
    let mut out = RunOutput::default();
    let mut results = Vec::new();
    for (metric, runs) in metrics.iter().zip(&reps) {
        let path = cfg.output_dir.join(format!("{}_{}.csv", cfg.stem(), file_label(metric)));
        let rows: Vec<Vec<f64>> =
            runs.iter().enumerate().map(|(r, c)| vec![r as f64, c.total, c.sep, c.nonsep, c.prob_sep()]).collect();
        write_csv(&path, &["replication", "estimate_total", "estimate_sep", "estimate_nonsep", "prob_sep"], &rows)?;
        out.files.push(path);
        let column = |f: fn(&integrate::VolumeCheckpoint) -> f64| runs.iter().map(f).collect::<Vec<f64>>();
        let null_for = |kind| match analytic::target_for(metric, kind) {
            Ok(t) => (t.value, "ledger"),
            Err(_) => (0.0, "zero"),
        };
        let (vt_null, vt_src) = null_for(TargetKind::VTotal);
        let (vs_null, vs_src) = null_for(TargetKind::VSep);
        let p = stats_json(&column(|c| c.prob_sep()), cfg.null_value, "config")?;
        out.summary.push(format!(
            "{}: P_sep mean = {}, sd = {}, t = {}",
            metric.name, p["mu"], p["eta"], p["t"]
        ));
        results.push(json!({
            "metric": metric.name.label(),
            "tilde": metric.tilde,
            "replications": runs.len(),
            "V_total": stats_json(&column(|c| c.total), vt_null, vt_src)?,
            "V_sep": stats_json(&column(|c| c.sep), vs_null, vs_src)?,
            "P_sep": p,
        }));
    }
    let report = json!({
        "command": cfg.command,
        "seed": cfg.seed,
        "config": config_echo(cfg),
        "results": results,
    });
    let path = cfg.output_dir.join(format!("{}.json", cfg.stem()));
    write_json(&path, &report)?;
    out.files.push(path);
    Ok(out)
}

/// JSON form of the ledger: one object per entry, keyed additionally by its quantity label.
pub fn conjectures_json() -> Value {
    let entries: Vec<Value> = analytic::conjecture_table()
        .iter()
        .map(|e| {
            let mut m = Map::new();
            m.insert("metric".into(), json!(e.metric));
            m.insert("quantity".into(), json!(e.quantity.label()));
            m.insert(e.quantity.label().into(), json!(e.expr()));
            m.insert("expr".into(), json!(e.expr()));
            m.insert("value".into(), if e.status == Status::Infinite { json!("inf") } else { num(e.value()) });
            m.insert("status".into(), json!(e.status));
            m.insert("printed".into(), e.printed.map_or(Value::Null, num));
            Value::Object(m)
        })
        .collect();
    let ratio = |name: &str, e: Option<analytic::Exact>| {
        e.map_or(Value::Null, |e| json!({ "name": name, "expr": e.to_string(), "value": num(e.value()) }))
    };
    json!({
        "entries": entries,
        "superseded_fundamental_probability": num(analytic::superseded_bures_probability()),
        "ratios": [
            ratio("P_sep KM / P_sep Bures", analytic::ledger_ratio("KM", Quantity::PSep, "Bures", Quantity::PSep)),
            ratio("Bures B_total / V_total", Some(analytic::total_area_volume_ratio())),
            ratio("Bures (B_sep + Beta) / V_sep", Some(analytic::separable_area_volume_ratio())),
            ratio("Bures Pi_sep rank3 / P_sep", analytic::ledger_ratio("Bures", Quantity::PiSepRank3, "Bures", Quantity::PSep)),
        ],
    })
}

fn cmd_conjectures(cfg: &RunConfig) -> Result<RunOutput> {
    prepare_dir(cfg)?;
    let report = conjectures_json();
    let path = cfg.output_dir.join(format!("{}.json", cfg.stem()));
    write_json(&path, &report)?;
    let summary = analytic::conjecture_table()
        .iter()
        .filter(|e| e.status != Status::Superseded)
        .map(|e| format!("{:8} {:16} {:28} {}", e.metric, e.quantity.label(), e.expr(), e.value()))
        .collect();
    Ok(RunOutput { files: vec![path], summary })
}

fn cmd_curvature(cfg: &RunConfig) -> Result<RunOutput> {
    let lg = analytic::levy_gromov_check();
    let mut traces = Vec::new();
    for n in [2usize, 3, 4] {
        let rho = vec![1.0 / n as f64; n];
        let nf = (n * n) as f64;
        traces.push(json!({
            "n": n,
            "trace": num(analytic::ricci_trace(&rho)?),
            "reference": num(0.5 * (5.0 * nf - 4.0) * (nf - 1.0)),
        }));
    }
    let mut minima = Vec::new();
    let mut summary = vec![format!(
        "Levy-Gromov: Is = {:.6}, s = {:.6}, ratio = {:.6}, {:?}",
        lg.is_alpha, lg.s_alpha, lg.ratio, lg.verdict
    )];
    for norm in [UnitNorm::Euclidean, UnitNorm::Bures] {
        for n in [3usize, 4] {
            let m = analytic::ricci_min_search(n, cfg.ricci_trials, cfg.ricci_refine, norm, cfg.seed)?;
            summary.push(format!("Ricci min N = {n} ({norm:?} unit): {:.6}", m.value));
            minima.push(m);
        }
    }
    prepare_dir(cfg)?;
    let report = json!({
        "command": cfg.command,
        "seed": cfg.seed,
        "config": config_echo(cfg),
        "levy_gromov": lg,
        "ricci_trace_fully_mixed": traces,
        "ricci_minima": minima,
    });
    let path = cfg.output_dir.join(format!("{}.json", cfg.stem()));
    write_json(&path, &report)?;
    Ok(RunOutput { files: vec![path], summary })
}
