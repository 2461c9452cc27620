//! Command-line front end: `describe`, `simulate-radial`, `simulate-dunkl`,
//! `verify-harmonic`, `verify-suite` and `export-plot-data`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dunkl_calculus::HarmonicTarget;
use crate::error::{Error, Result};
use crate::jump_lift::{DunklSimulator, LiftPlan, ModeRequest};
use crate::linalg::norm_sq;
use crate::radial_sde::{simulate_radial, Recording, SimulationConfig, SimulationSummary, WallPolicy};
use crate::root_systems::{check_invariance_condition, MultiplicityFunction, RootSystem};
use crate::stat_verify::{harmonicity_check, render_table, run_suite, SuiteSettings, SuiteTarget, VerificationReport};
use crate::trajectory::{read_csv, write_csv, Trajectory};

/// Environment variable that replaces `sim.seed` of a config file.
pub const SEED_ENV: &str = "DUNKL_LAB_SEED";

#[derive(Debug, Parser)]
#[command(name = "dunkl-lab", version, about = "Simulate and verify Dunkl processes")]
pub struct Cli {
    /// Worker threads for path simulation (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print roots, orbits, Weyl group order, chamber and the invariance table.
    Describe {
        #[command(flatten)]
        system: SystemArgs,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Simulate the radial process and write CSV trajectories.
    SimulateRadial(RunArgs),
    /// Simulate the full jump process by the skew-product lift.
    SimulateDunkl {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
    },
    /// Harmonicity residuals of δ, δ̄, π and the power identity.
    VerifyHarmonic {
        #[command(flatten)]
        system: SystemArgs,
        /// Per-orbit multiplicities, comma separated; one value is broadcast.
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run the statistical battery; exit status 1 if any check fails.
    VerifySuite(RunArgs),
    /// Time-binned statistics of a trajectory CSV.
    ExportPlotData {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 50)]
        bins: usize,
    },
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    #[arg(long, value_enum)]
    pub system: SystemKind,
    /// Ambient dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Roots of a custom system as a JSON array of vectors.
    #[arg(long)]
    pub roots: Option<String>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Override a config value, e.g. `--set sim.paths=100`. Values parse as
    /// JSON and fall back to strings.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum SystemKind {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
    #[value(name = "custom")]
    #[serde(rename = "custom")]
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Shortcut,
    General,
    Auto,
}

impl From<ModeArg> for ModeRequest {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Shortcut => ModeRequest::Shortcut,
            ModeArg::General => ModeRequest::General,
            ModeArg::Auto => ModeRequest::Auto,
        }
    }
}

/// `{"type": "A"|"B"|"custom", "n": …, "roots": […]}`. Custom roots may be
/// listed without their negatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    #[serde(rename = "type")]
    pub kind: SystemKind,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub roots: Option<Vec<Vec<f64>>>,
}

impl SystemSection {
    pub fn build(&self) -> Result<RootSystem> {
        match self.kind {
            SystemKind::A => RootSystem::type_a(self.n.ok_or_else(|| missing("n"))?),
            SystemKind::B => RootSystem::type_b(self.n.ok_or_else(|| missing("n"))?),
            SystemKind::Custom => {
                let given = self.roots.as_ref().ok_or_else(|| missing("roots"))?;
                let mut roots = given.clone();
                for r in given {
                    let neg: Vec<f64> = r.iter().map(|v| -v).collect();
                    if !roots.contains(&neg) {
                        roots.push(neg);
                    }
                }
                let sys = RootSystem::from_roots(&roots, None)?;
                if let Some(n) = self.n {
                    if n != sys.dimension() {
                        return Err(Error::DimensionMismatch { expected: n, got: sys.dimension() });
                    }
                }
                Ok(sys)
            }
        }
    }
}

fn missing(field: &str) -> Error {
    Error::Config {
        pointer: format!("/system/{field}"),
        message: "required for this system type".into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(rename = "T")]
    pub horizon: f64,
    pub dt: f64,
    pub paths: usize,
    pub seed: u64,
    #[serde(default)]
    pub wall_policy: WallPolicy,
    #[serde(default)]
    pub recording: Recording,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    /// Trajectory CSV plus a summary JSON next to it.
    #[default]
    Csv,
    /// Summary JSON only.
    Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
}

/// A run description read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub system: SystemSection,
    /// Per-orbit multiplicities; a single value is broadcast.
    pub k: Vec<f64>,
    #[serde(default)]
    pub k_prime: Option<Vec<f64>>,
    #[serde(default)]
    pub enumeration: Option<Vec<usize>>,
    pub x0: Vec<f64>,
    pub sim: SimSection,
    #[serde(default)]
    pub output: Option<OutputSection>,
    /// Sample sizes for `verify-suite`; `seed`, `horizon` and `dt` are taken
    /// from `sim`.
    #[serde(default)]
    pub suite: Option<SuiteSettings>,
}

/// Everything a subcommand needs, built from a validated config.
#[derive(Debug, Clone)]
pub struct Run {
    pub system: Arc<RootSystem>,
    pub k: MultiplicityFunction,
    pub k_prime: Option<MultiplicityFunction>,
    pub enumeration: Option<Vec<usize>>,
    pub x0: Vec<f64>,
    pub config: SimulationConfig,
    pub output: Option<OutputSection>,
    pub suite: Option<SuiteSettings>,
}

impl RunConfigFile {
    /// Parse with JSON-pointer error locations, after applying `overrides`
    /// (`key.path=value`) and the seed environment variable.
    pub fn parse(text: &str, overrides: &[String], env_seed: Option<&str>) -> Result<Self> {
        let mut doc: Value = serde_json::from_str(text).map_err(|e| Error::Config {
            pointer: String::new(),
            message: e.to_string(),
        })?;
        if let Some(seed) = env_seed {
            let seed: u64 = seed.trim().parse().map_err(|_| Error::Config {
                pointer: "/sim/seed".into(),
                message: format!("{SEED_ENV}={seed:?} is not an unsigned integer"),
            })?;
            set_path(&mut doc, "sim.seed", Value::from(seed))?;
        }
        for o in overrides {
            let (key, raw) = o
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("override {o:?} is not KEY=VALUE")))?;
            let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            set_path(&mut doc, key.trim(), value)?;
        }
        serde_path_to_error::deserialize(doc).map_err(|e| Error::Config {
            pointer: pointer_of(e.path()),
            message: e.inner().to_string(),
        })
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let env = std::env::var(SEED_ENV).ok();
        Self::parse(&text, overrides, env.as_deref())
    }

    pub fn resolve(&self, threads: usize) -> Result<Run> {
        let system = Arc::new(self.system.build()?);
        let k = multiplicity(&system, &self.k, "/k")?;
        let k_prime = self
            .k_prime
            .as_ref()
            .map(|v| multiplicity(&system, v, "/k_prime"))
            .transpose()?;
        if self.x0.len() != system.dimension() {
            return Err(Error::Config {
                pointer: "/x0".into(),
                message: format!("expected {} coordinates, got {}", system.dimension(), self.x0.len()),
            });
        }
        let config = SimulationConfig::new(self.sim.horizon, self.sim.dt, self.sim.paths, self.sim.seed)
            .with_wall_policy(self.sim.wall_policy)
            .with_recording(self.sim.recording)
            .with_threads(threads);
        config.validate().map_err(|e| Error::Config {
            pointer: "/sim".into(),
            message: e.to_string(),
        })?;
        Ok(Run {
            system,
            k,
            k_prime,
            enumeration: self.enumeration.clone(),
            x0: self.x0.clone(),
            config,
            output: self.output.clone(),
            suite: self.suite.clone(),
        })
    }
}

fn multiplicity(system: &RootSystem, values: &[f64], pointer: &str) -> Result<MultiplicityFunction> {
    let orbits = system.positive_orbits().len();
    let values = if values.len() == 1 { vec![values[0]; orbits] } else { values.to_vec() };
    MultiplicityFunction::new(system, &values).map_err(|e| Error::Config {
        pointer: pointer.into(),
        message: e.to_string(),
    })
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut s = String::new();
    for seg in path.iter() {
        s.push('/');
        match seg {
            Segment::Seq { index } => s.push_str(&index.to_string()),
            Segment::Map { key } => s.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => s.push_str(variant),
            Segment::Unknown => s.push('?'),
        }
    }
    if s.is_empty() {
        s.push('/');
    }
    s
}

fn set_path(doc: &mut Value, key: &str, value: Value) -> Result<()> {
    let mut cur = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        cur = match cur {
            Value::Object(map) => {
                if last {
                    map.insert(part.to_string(), value);
                    return Ok(());
                }
                map.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let idx: usize = part
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("override {key:?}: {part:?} is not an index")))?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or(Error::IndexOutOfRange { index: idx, len })?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(Error::InvalidArgument(format!("override {key:?} descends into a scalar"))),
        };
    }
    Err(Error::InvalidArgument("empty override key".into()))
}

impl SystemArgs {
    fn build(&self) -> Result<RootSystem> {
        let roots = self.roots.as_deref().map(serde_json::from_str).transpose()?;
        SystemSection {
            kind: self.system,
            n: self.n,
            roots,
        }
        .build()
    }
}

/// Parse the process arguments, run, and map the outcome to an exit code.
/// Errors go to standard error with status 2; failed verifications exit 1.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli, &mut std::io::stdout().lock()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Execute one subcommand. `Ok(false)` means a verification failed.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    match &cli.command {
        Command::Describe { system, json } => describe(&system.build()?, *json, out),
        Command::SimulateRadial(args) => {
            let run = RunConfigFile::load(&args.config, &args.overrides)?.resolve(cli.threads)?;
            let paths = simulate_radial(&run.system, &run.k, &run.x0, &run.config)?;
            emit(&run, &paths, out)
        }
        Command::SimulateDunkl { run: args, mode } => {
            let run = RunConfigFile::load(&args.config, &args.overrides)?.resolve(cli.threads)?;
            let order = run.enumeration.clone().unwrap_or_else(|| run.system.positive().to_vec());
            if order.len() != run.system.positive().len() {
                return Err(Error::InvalidPlan(format!(
                    "enumeration has {} roots, R_+ has {}",
                    order.len(),
                    run.system.positive().len()
                )));
            }
            let rates = run.k_prime.as_ref().unwrap_or(&run.k);
            let plan = LiftPlan::new(&run.system, &order, rates, (*mode).into())?;
            let sim = DunklSimulator::with_plan(run.system.clone(), run.k.clone(), plan)?;
            let paths = sim.simulate(&run.x0, &run.config)?;
            emit(&run, &paths, out)
        }
        Command::VerifyHarmonic { system, k, points, seed } => {
            let system = Arc::new(system.build()?);
            let k = multiplicity(&system, k, "--k")?;
            verify_harmonic(&system, &k, *points, *seed, out)
        }
        Command::VerifySuite(args) => {
            let run = RunConfigFile::load(&args.config, &args.overrides)?.resolve(cli.threads)?;
            verify_suite(&run, out)
        }
        Command::ExportPlotData { input, out: path, bins } => {
            let rows = read_csv(BufReader::new(File::open(input)?))?;
            export_plot_data(&rows, *bins, BufWriter::new(File::create(path)?))?;
            writeln!(out, "wrote {} bins to {}", bins, path.display())?;
            Ok(true)
        }
    }
}

#[derive(Debug, Serialize)]
struct Description {
    dimension: usize,
    roots: Vec<Vec<f64>>,
    positive: Vec<usize>,
    orbits: Vec<Vec<usize>>,
    weyl_order: usize,
    /// The chamber is `{x : α·x > 0}` over these positive roots.
    chamber: Vec<Vec<f64>>,
    invariance: Vec<bool>,
}

fn describe(system: &RootSystem, json: bool, out: &mut dyn Write) -> Result<bool> {
    let m = system.positive().len();
    let invariance = (1..=m)
        .map(|i| check_invariance_condition(system, system.positive(), i))
        .collect::<Result<Vec<_>>>()?;
    let d = Description {
        dimension: system.dimension(),
        roots: system.roots().to_vec(),
        positive: system.positive().to_vec(),
        orbits: system.positive_orbits(),
        weyl_order: system.weyl_group().order(),
        chamber: system.positive_roots().iter().map(|r| r.to_vec()).collect(),
        invariance,
    };
    if json {
        serde_json::to_writer_pretty(&mut *out, &d)?;
        writeln!(out)?;
        return Ok(true);
    }
    writeln!(out, "dimension {}, {} roots, |W| = {}", d.dimension, d.roots.len(), d.weyl_order)?;
    writeln!(out, "positive roots (default enumeration):")?;
    for (i, &r) in d.positive.iter().enumerate() {
        writeln!(out, "  α_{} = root {r:>2}  {}", i + 1, fmt_vec(system.root(r)))?;
    }
    for (o, members) in d.orbits.iter().enumerate() {
        writeln!(out, "orbit {o}: positive roots {members:?}")?;
    }
    writeln!(out, "chamber: α·x > 0 for every positive root")?;
    writeln!(out, "invariance condition:")?;
    for (i, ok) in d.invariance.iter().enumerate() {
        writeln!(out, "  i = {:>2}: {ok}", i + 1)?;
    }
    Ok(true)
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:+.6}")).collect();
    format!("({})", parts.join(", "))
}

fn emit(run: &Run, paths: &[Trajectory], out: &mut dyn Write) -> Result<bool> {
    let summary = SimulationSummary::from_trajectories(paths, &run.config);
    if let Some(o) = &run.output {
        if o.format == OutputFormat::Csv {
            write_csv(BufWriter::new(File::create(&o.path)?), paths)?;
        }
        let mut p = o.path.clone().into_os_string();
        p.push(".summary.json");
        std::fs::write(&p, serde_json::to_string_pretty(&summary)? + "\n")?;
    } else {
        write_csv(&mut *out, paths)?;
        return Ok(true);
    }
    serde_json::to_writer_pretty(&mut *out, &summary)?;
    writeln!(out)?;
    Ok(true)
}

fn verify_harmonic(
    system: &Arc<RootSystem>,
    k: &MultiplicityFunction,
    points: usize,
    seed: u64,
    out: &mut dyn Write,
) -> Result<bool> {
    let mut reports: Vec<VerificationReport> = Vec::new();
    reports.push(harmonicity_check("harmonic/delta", HarmonicTarget::Delta, system, k, points, 1e-5, seed)?);
    if k.per_orbit().contains(&0.5) {
        reports.push(harmonicity_check("harmonic/delta_bar", HarmonicTarget::DeltaBar, system, k, points, 1e-5, seed)?);
    }
    reports.push(harmonicity_check("harmonic/laplacian_pi", HarmonicTarget::Pi, system, k, points, 1e-6, seed)?);
    let mut values = k.per_orbit().to_vec();
    values.dedup();
    for kv in values {
        reports.push(harmonicity_check(
            &format!("harmonic/power_identity/k={kv}"),
            HarmonicTarget::PowerIdentity { k: kv },
            system,
            k,
            points,
            1e-6,
            seed,
        )?);
    }
    write!(out, "{}", render_table(&reports))?;
    Ok(reports.iter().all(|r| r.passed))
}

fn verify_suite(run: &Run, out: &mut dyn Write) -> Result<bool> {
    let mut settings = run.suite.clone().unwrap_or_default();
    settings.seed = run.config.seed;
    settings.horizon = run.config.horizon;
    settings.dt = run.config.dt;
    settings.threads = run.config.threads;
    let target = SuiteTarget {
        system: run.system.clone(),
        k: run.k.clone(),
        k_prime: run.k_prime.clone(),
        x0: run.x0.clone(),
    };
    let outcome = run_suite(&target, &settings)?;
    write!(out, "{}", render_table(&outcome.reports))?;
    for r in outcome.reports.iter().filter(|r| !r.detail.is_empty()) {
        writeln!(out, "{}: {}", r.name, r.detail)?;
    }
    if let Some(o) = &run.output {
        std::fs::write(&o.path, serde_json::to_string_pretty(&outcome.reports)? + "\n")?;
    }
    let passed = outcome.checks_passed();
    outcome.into_result()?;
    Ok(passed)
}

/// Bin the state rows of a trajectory CSV by time and write
/// `t_lo,t_hi,count,mean_norm_sq,se_norm_sq,mean_x_1..,jumps,wall_hits`.
pub fn export_plot_data<W: Write>(rows: &[crate::trajectory::CsvRow], bins: usize, mut w: W) -> Result<()> {
    if bins == 0 {
        return Err(Error::InvalidArgument("bins must be positive".into()));
    }
    let n = rows.first().map_or(0, |r| r.x.len());
    let t_max = rows.iter().map(|r| r.t).fold(0.0f64, f64::max);
    let width = if t_max > 0.0 { t_max / bins as f64 } else { 1.0 };
    let mut count = vec![0usize; bins];
    let mut sum = vec![0.0; bins];
    let mut sum_sq = vec![0.0; bins];
    let mut coord = vec![vec![0.0; n]; bins];
    let mut jumps = vec![0usize; bins];
    let mut hits = vec![0usize; bins];
    for r in rows {
        let b = ((r.t / width) as usize).min(bins - 1);
        if r.event.starts_with("jump:") {
            jumps[b] += 1;
            continue;
        }
        if r.event == "T0" {
            hits[b] += 1;
        }
        let q = norm_sq(&r.x);
        count[b] += 1;
        sum[b] += q;
        sum_sq[b] += q * q;
        for (c, v) in coord[b].iter_mut().zip(&r.x) {
            *c += v;
        }
    }
    write!(w, "t_lo,t_hi,count,mean_norm_sq,se_norm_sq")?;
    for i in 1..=n {
        write!(w, ",mean_x_{i}")?;
    }
    writeln!(w, ",jumps,wall_hits")?;
    for b in 0..bins {
        let c = count[b] as f64;
        let (mean, se) = if count[b] == 0 {
            (f64::NAN, f64::NAN)
        } else if count[b] == 1 {
            (sum[b], f64::NAN)
        } else {
            let mean = sum[b] / c;
            let var = ((sum_sq[b] - c * mean * mean) / (c - 1.0)).max(0.0);
            (mean, (var / c).sqrt())
        };
        write!(w, "{:.16e},{:.16e},{},{mean:.16e},{se:.16e}", b as f64 * width, (b + 1) as f64 * width, count[b])?;
        for v in &coord[b] {
            write!(w, ",{:.16e}", if count[b] == 0 { f64::NAN } else { v / c })?;
        }
        writeln!(w, ",{},{}", jumps[b], hits[b])?;
    }
    w.flush()?;
    Ok(())
}
