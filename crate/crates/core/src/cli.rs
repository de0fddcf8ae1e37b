//! Command-line pipeline: generate or load a system, run the pole searches,
//! build reduced models and evaluate them. Every subcommand writes its
//! artifacts and a `manifest.json` into the output directory.
//!
//! Options can also come from a TOML or JSON file given with `--config`.
//! Keys are the long flag names with underscores, either at top level or in a
//! table named after the subcommand. Flags given on the command line win.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::dpa::{canonicalize_lambda, dpa_iterate, DpaOptions, DpaTrace};
use crate::error::{Error, PartialResult};
use crate::eval::hinf::{sampled_hinf_error, sampled_hinf_norm, FrequencyGrid};
use crate::eval::oracle::{dense_floquet_oracle, OracleReport, MAX_ORACLE_DIM};
use crate::eval::radau::{simulate_fom_dense, RadauOptions, MAX_DENSE_DIM};
use crate::eval::{balanced_truncation, relative_error, simulate_fom_example, simulate_rom, uniform_grid, InputSignal};
use crate::hill::ResolventWorkspace;
use crate::phv::{estimate_fourier_depth, eval_phv};
use crate::rom::{build_rom, LtiExtension, PartialFloquet, Rom};
use crate::sadpa::{sadpa_run, SadpaOptions, SadpaOutcome};
use crate::systems::{build_example, random_system, ExampleGroundTruth, ExampleSpec, LtpSystem};

/// Exit status for malformed invocations.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for numerical failures.
pub const EXIT_NUMERICAL: i32 = 1;

/// Oracle agreement required by `oracle-check`.
pub const ORACLE_AGREEMENT_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "ltp-reduce", version, about = "Dominant-pole model reduction for linear time-periodic systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the benchmark system (or a random one) to system.json.
    GenerateExample(GenerateArgs),
    /// Single dominant pole from one shift.
    Dpa(DpaArgs),
    /// Several dominant eigentriples with subspace acceleration.
    Sadpa(SadpaArgs),
    /// Reduced model and LTI extension from saved eigentriples.
    BuildRom(BuildRomArgs),
    /// Time-domain output of the full and reduced models.
    Simulate(SimulateArgs),
    /// Sampled H-infinity error of the reduced model's LTI extension.
    Hinf(HinfArgs),
    /// Dominant-pole truncation against balanced truncation.
    CompareBt(CompareBtArgs),
    /// Principal harmonics vector along a line of shifts.
    PhvSweep(PhvArgs),
    /// Cross-check the Hill and monodromy Floquet oracles.
    OracleCheck(OracleArgs),
}

/// Where the system comes from and where results go.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct CommonArgs {
    /// TOML or JSON file with default option values.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// System JSON file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<PathBuf>,
    /// Benchmark spec, e.g. `n=1000` or `n=20,n_slow=10,slow=-4:0,fast=3:6`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub example: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct GenerateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    /// State dimension [default: 1000].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Number of slow exponents [default: min(n, 10)].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_slow: Option<usize>,
    /// Decades of the slow exponents, `lo:hi`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slow_range: Option<String>,
    /// Decades of the fast exponents, `lo:hi`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fast_range: Option<String>,
    /// Generate a random system of this Fourier depth instead.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random_depth: Option<usize>,
    /// Seed of the random system [default: 0].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct DpaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    /// Real part of the initial shift [default: -0.1].
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s0_re: Option<f64>,
    /// Imaginary part of the initial shift [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s0_im: Option<f64>,
    /// Relative eigenresidual for convergence [default: 1e-8].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Iteration cap [default: 50].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    /// Fourier depth of the transformed ports; estimated when absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SadpaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    /// Initial shift(s), `re` or `re,im`; repeat for several [default: -0.1].
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s0: Option<Vec<String>>,
    /// Number of eigentriples to find [default: 5].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_want: Option<usize>,
    /// Relative eigenresidual for convergence [default: 1e-8].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Resolvent solve budget [default: 50].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    /// Fourier depth of the transformed ports; estimated when absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct BuildRomArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    /// Defaults to `<out>/partial_floquet.json`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partial_floquet: Option<PathBuf>,
    /// Harmonics kept in the extension; all port harmonics when absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    /// Defaults to `<out>/rom.json`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rom: Option<PathBuf>,
    /// `exp:<sigma>`, `zero`, or `re,im,sigma,k;...` [default: exp:-1].
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    /// End of the time window [default: 20].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    /// Uniform output samples on `[0, t_end]` [default: 2000].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Relative tolerance of the ROM integrator [default: 1e-12].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

/// Frequency grid flags shared by `hinf` and `compare-bt`.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct GridArgs {
    /// Lowest frequency, as a power of ten [default: -6].
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_lo_decade: Option<f64>,
    /// Highest frequency, as a power of ten [default: 7].
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_hi_decade: Option<f64>,
    /// Log-spaced samples per sign of `nu` [default: 2000].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_points: Option<usize>,
}

impl GridArgs {
    fn grid(&self) -> FrequencyGrid {
        let d = FrequencyGrid::default();
        FrequencyGrid {
            lo_decade: self.nu_lo_decade.unwrap_or(d.lo_decade),
            hi_decade: self.nu_hi_decade.unwrap_or(d.hi_decade),
            points: self.nu_points.unwrap_or(d.points),
            ..d
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct HinfArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    /// Defaults to `<out>/rom.json`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rom: Option<PathBuf>,
    /// Harmonics kept in both extensions [default: 1].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct CompareBtArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    /// Largest reduced order compared [default: 10].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_order: Option<usize>,
    /// Harmonics kept in the full extension [default: 1].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct PhvArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    /// Real part of the shifts [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Lowest `Im s`, as a power of ten [default: -3].
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_lo_decade: Option<f64>,
    /// Highest `Im s`, as a power of ten [default: 3].
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_hi_decade: Option<f64>,
    /// Log-spaced shifts, plus `nu = 0` [default: 61].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_points: Option<usize>,
    /// Fourier depth; estimated when absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct OracleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

/// Failure of a CLI run.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numerical(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numerical(Error::Io(e))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Numerical(Error::Io(std::io::Error::other(e)))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parse `argv`, run, and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Numerical(e)) => {
            let report = json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{report}");
            EXIT_NUMERICAL
        }
    }
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::GenerateExample(a) => generate(merge_config("generate-example", a)?),
        Command::Dpa(a) => dpa(merge_config("dpa", a)?),
        Command::Sadpa(a) => sadpa(merge_config("sadpa", a)?),
        Command::BuildRom(a) => build_rom_cmd(merge_config("build-rom", a)?),
        Command::Simulate(a) => simulate(merge_config("simulate", a)?),
        Command::Hinf(a) => hinf(merge_config("hinf", a)?),
        Command::CompareBt(a) => compare_bt(merge_config("compare-bt", a)?),
        Command::PhvSweep(a) => phv_sweep(merge_config("phv-sweep", a)?),
        Command::OracleCheck(a) => oracle_check(merge_config("oracle-check", a)?),
    }
}

trait HasCommon {
    fn common(&self) -> &CommonArgs;
    fn common_mut(&mut self) -> &mut CommonArgs;
}

macro_rules! has_common {
    ($($t:ty),*) => {$(
        impl HasCommon for $t {
            fn common(&self) -> &CommonArgs { &self.common }
            fn common_mut(&mut self) -> &mut CommonArgs { &mut self.common }
        }
    )*};
}

has_common!(GenerateArgs, DpaArgs, SadpaArgs, BuildRomArgs, SimulateArgs, HinfArgs, CompareBtArgs, PhvArgs, OracleArgs);

fn read_config(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let is_toml = path.extension().is_some_and(|x| x == "toml");
    let value: Value = if is_toml {
        toml::from_str(&text).map_err(|e| usage(format!("bad TOML in {}: {e}", path.display())))?
    } else {
        serde_json::from_str(&text).map_err(|e| usage(format!("bad JSON in {}: {e}", path.display())))?
    };
    match value {
        Value::Object(_) => Ok(value),
        _ => Err(usage("config file must hold a table of options")),
    }
}

/// Fill options absent on the command line from the config file.
fn merge_config<T>(name: &str, args: T) -> CliResult<T>
where
    T: HasCommon + Serialize + DeserializeOwned,
{
    let Some(path) = args.common().config.clone() else {
        return Ok(args);
    };
    let Value::Object(file) = read_config(&path)? else {
        unreachable!("checked in read_config")
    };
    let mut merged = Map::new();
    for (k, v) in &file {
        if !v.is_object() {
            merged.insert(k.replace('-', "_"), v.clone());
        }
    }
    if let Some(Value::Object(section)) = file.get(name) {
        for (k, v) in section {
            merged.insert(k.replace('-', "_"), v.clone());
        }
    }
    let Value::Object(flags) = serde_json::to_value(&args).map_err(Error::from)? else {
        unreachable!("argument structs serialize to objects")
    };
    merged.extend(flags);
    let mut out: T = serde_json::from_value(Value::Object(merged)).map_err(|e| usage(format!("config {}: {e}", path.display())))?;
    out.common_mut().config = Some(path);
    Ok(out)
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// `re`, `re,im`, `re+imi` or `re-imi`.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    if let Some((re, im)) = s.split_once(',') {
        return Some(Complex64::new(re.trim().parse().ok()?, im.trim().parse().ok()?));
    }
    if let Some(body) = s.strip_suffix('i') {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let cut = (1..bytes.len())
            .rev()
            .find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
        return match cut {
            Some(j) => {
                let im = if j + 1 == body.len() { format!("{}1", &body[j..]) } else { body[j..].to_string() };
                Some(Complex64::new(body[..j].parse().ok()?, im.trim_start_matches('+').parse().ok()?))
            }
            None => Some(Complex64::new(0.0, if body.is_empty() { 1.0 } else { body.parse().ok()? })),
        };
    }
    Some(Complex64::new(s.parse().ok()?, 0.0))
}

fn parse_range(s: &str) -> CliResult<[f64; 2]> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| usage(format!("range {s:?} is not lo:hi")))?;
    let p = |x: &str| x.trim().parse::<f64>().map_err(|_| usage(format!("range {s:?} is not lo:hi")));
    Ok([p(lo)?, p(hi)?])
}

/// `n=1000,n_slow=10,slow=-4:0,fast=3:6`; omitted keys take the defaults.
pub fn parse_example_spec(s: &str) -> CliResult<ExampleSpec> {
    let mut spec = ExampleSpec::default();
    let mut n_slow = None;
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, val) = part.split_once('=').ok_or_else(|| usage(format!("example field {part:?} is not key=value")))?;
        let int = || val.trim().parse::<usize>().map_err(|_| usage(format!("example field {part:?} needs an integer")));
        match key.trim() {
            "n" => spec.n = int()?,
            "n_slow" => n_slow = Some(int()?),
            "slow" => spec.slow_range = parse_range(val)?,
            "fast" => spec.fast_range = parse_range(val)?,
            other => return Err(usage(format!("unknown example field {other:?}"))),
        }
    }
    spec.n_slow = n_slow.unwrap_or(spec.n.min(10));
    Ok(spec)
}

enum Source {
    Example(ExampleSpec),
    File(PathBuf),
}

struct Loaded {
    sys: LtpSystem,
    gt: Option<ExampleGroundTruth>,
    source: Value,
}

fn out_dir(common: &CommonArgs) -> CliResult<PathBuf> {
    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir).map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn resolve_source(common: &CommonArgs, out: &Path) -> CliResult<Source> {
    if let Some(spec) = &common.example {
        if common.system.is_some() {
            return Err(usage("give either --example or --system, not both"));
        }
        return Ok(Source::Example(parse_example_spec(spec)?));
    }
    if let Some(path) = &common.system {
        return Ok(Source::File(path.clone()));
    }
    let example = out.join("example.json");
    if example.exists() {
        let text = fs::read_to_string(&example)?;
        let spec: ExampleSpec = serde_json::from_str(&text).map_err(|e| usage(format!("bad {}: {e}", example.display())))?;
        return Ok(Source::Example(spec));
    }
    let system = out.join("system.json");
    if system.exists() {
        return Ok(Source::File(system));
    }
    Err(usage(format!(
        "no system given: use --example, --system, or run generate-example into {}",
        out.display()
    )))
}

fn load_system(common: &CommonArgs, out: &Path) -> CliResult<Loaded> {
    match resolve_source(common, out)? {
        Source::Example(spec) => {
            let (sys, gt) = build_example(&spec).map_err(|e| usage(e.to_string()))?;
            Ok(Loaded {
                sys,
                gt: Some(gt),
                source: json!({ "example": spec }),
            })
        }
        Source::File(path) => {
            let sys = LtpSystem::load(&path).map_err(|e| usage(format!("cannot load {}: {e}", path.display())))?;
            Ok(Loaded {
                sys,
                gt: None,
                source: json!({ "system": path }),
            })
        }
    }
}

/// Run record written next to every set of artifacts.
struct Manifest {
    subcommand: &'static str,
    config: Value,
    started: Instant,
    timings: BTreeMap<String, f64>,
    diagnostics: Map<String, Value>,
}

impl Manifest {
    fn new<T: Serialize>(subcommand: &'static str, args: &T) -> Self {
        Self {
            subcommand,
            config: serde_json::to_value(args).unwrap_or(Value::Null),
            started: Instant::now(),
            timings: BTreeMap::new(),
            diagnostics: Map::new(),
        }
    }

    fn time<R>(&mut self, stage: &str, f: impl FnOnce() -> R) -> R {
        let t = Instant::now();
        let r = f();
        self.timings.insert(stage.to_string(), t.elapsed().as_secs_f64());
        r
    }

    fn set(&mut self, key: &str, value: impl Serialize) {
        self.diagnostics.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    fn write(mut self, out: &Path) -> CliResult<()> {
        self.timings.insert("total".into(), self.started.elapsed().as_secs_f64());
        let doc = json!({
            "subcommand": self.subcommand,
            "config": self.config,
            "versions": {
                "ltp-reduce": env!("CARGO_PKG_VERSION"),
                "manifest_schema": 1,
            },
            "timings_s": self.timings,
            "diagnostics": self.diagnostics,
        });
        fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&doc).map_err(Error::from)?)?;
        Ok(())
    }
}

fn record_hill(m: &mut Manifest, ws: &ResolventWorkspace) {
    let d = ws.diagnostics();
    m.set("N_h", d.harmonic_depth);
    m.set("hill", d);
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn fourier_depth(sys: &LtpSystem, ws: &mut ResolventWorkspace, k: Option<usize>) -> CliResult<usize> {
    Ok(match k {
        Some(k) => k,
        None => estimate_fourier_depth(sys, ws, Complex64::new(1.0, 0.0))?,
    })
}

fn positive_tol(tol: Option<f64>) -> CliResult<f64> {
    let tol = tol.unwrap_or(1e-8);
    if !(tol > 0.0) {
        return Err(usage(format!("--tol must be positive, got {tol}")));
    }
    Ok(tol)
}

fn generate(args: GenerateArgs) -> CliResult<()> {
    let out = out_dir(&args.common)?;
    let mut m = Manifest::new("generate-example", &args);
    let n = args.n.unwrap_or(1000);
    let example = out.join("example.json");
    if let Some(depth) = args.random_depth {
        let seed = args.seed.unwrap_or(0);
        let sys = random_system(n, depth, seed).map_err(|e| usage(e.to_string()))?;
        sys.save(out.join("system.json"))?;
        if example.exists() {
            fs::remove_file(&example)?;
        }
        m.set("kind", "random");
        m.set("seed", seed);
    } else {
        let d = ExampleSpec::default();
        let spec = ExampleSpec {
            n,
            n_slow: args.n_slow.unwrap_or(n.min(d.n_slow)),
            slow_range: args.slow_range.as_deref().map(parse_range).transpose()?.unwrap_or(d.slow_range),
            fast_range: args.fast_range.as_deref().map(parse_range).transpose()?.unwrap_or(d.fast_range),
        };
        let (sys, gt) = m.time("build", || build_example(&spec)).map_err(|e| usage(e.to_string()))?;
        sys.save(out.join("system.json"))?;
        fs::write(&example, serde_json::to_string_pretty(&spec).map_err(Error::from)?)?;
        m.set("kind", "benchmark");
        m.set("spectrum_right", &gt.spectrum_right);
    }
    m.set("n", n);
    m.write(&out)
}

fn dpa(args: DpaArgs) -> CliResult<()> {
    let out = out_dir(&args.common)?;
    let mut m = Manifest::new("dpa", &args);
    let loaded = load_system(&args.common, &out)?;
    m.set("source", &loaded.source);
    let sys = &loaded.sys;
    let opts = DpaOptions {
        tol: positive_tol(args.tol)?,
        max_iter: args.max_iter.unwrap_or(DpaOptions::default().max_iter),
    };
    let s0 = Complex64::new(args.s0_re.unwrap_or(-0.1), args.s0_im.unwrap_or(0.0));
    let mut ws = ResolventWorkspace::for_system(sys);
    let k = fourier_depth(sys, &mut ws, args.k)?;
    m.set("K", k);
    let result = m.time("dpa", || dpa_iterate(sys, &mut ws, s0, k, &opts));
    record_hill(&mut m, &ws);
    let (trace, triple) = match result {
        Ok((t, trace)) => (trace, Some(t)),
        Err(Error::MaxIterExceeded { iterations, partial }) => {
            let trace = match *partial {
                PartialResult::Dpa(trace) => trace,
                PartialResult::Sadpa(_) => DpaTrace::default(),
            };
            write_dpa_trace(&out, &trace)?;
            m.set("iterations", iterations);
            m.set("converged", false);
            m.write(&out)?;
            return Err(Error::MaxIterExceeded {
                iterations,
                partial: Box::new(PartialResult::Dpa(trace)),
            }
            .into());
        }
        Err(e) => return Err(e.into()),
    };
    let t = triple.expect("converged").canonicalized();
    write_dpa_trace(&out, &trace)?;
    let doc = json!({
        "lambda": t.lambda,
        "residual": t.residual,
        "residual_adj": t.residual_adj,
        "iterations": trace.iterations,
        "shifts": trace.shifts,
    });
    fs::write(out.join("dpa.json"), serde_json::to_string_pretty(&doc).map_err(Error::from)?)?;
    PartialFloquet::from_triples(std::slice::from_ref(&t))?.save(out.join("partial_floquet.json"))?;
    m.set("iterations", trace.iterations);
    m.set("converged", true);
    m.set("lambda", t.lambda);
    m.write(&out)
}

fn write_dpa_trace(out: &Path, trace: &DpaTrace) -> CliResult<()> {
    write_csv(
        &out.join("dpa_trace.csv"),
        &["iteration", "shift_re", "shift_im", "residual"],
        trace
            .shifts
            .iter()
            .zip(&trace.residuals)
            .enumerate()
            .map(|(i, (s, r))| vec![i.to_string(), fmt_f64(s.re), fmt_f64(s.im), fmt_f64(*r)]),
    )
}

fn port_extension(rom: &Rom, k: Option<usize>) -> CliResult<LtiExtension> {
    let k = k.unwrap_or(rom.br.depth().max(rom.cr.depth()));
    Ok(LtiExtension::from_rom(rom, k)?)
}

fn sadpa(args: SadpaArgs) -> CliResult<()> {
    let out = out_dir(&args.common)?;
    let mut m = Manifest::new("sadpa", &args);
    let loaded = load_system(&args.common, &out)?;
    m.set("source", &loaded.source);
    let sys = &loaded.sys;
    let d = SadpaOptions::default();
    let opts = SadpaOptions {
        tol: positive_tol(args.tol)?,
        max_iter: args.max_iter.unwrap_or(d.max_iter),
        ..d
    };
    let n_want = args.n_want.unwrap_or(5);
    if n_want == 0 {
        return Err(usage("--n-want must be at least 1"));
    }
    let s0: Vec<Complex64> = match &args.s0 {
        None => vec![Complex64::new(-0.1, 0.0)],
        Some(list) => list
            .iter()
            .map(|s| parse_complex(s).ok_or_else(|| usage(format!("bad shift {s:?}"))))
            .collect::<CliResult<_>>()?,
    };
    let mut ws = ResolventWorkspace::for_system(sys);
    let k = fourier_depth(sys, &mut ws, args.k)?;
    m.set("K", k);
    let result = m.time("sadpa", || sadpa_run(sys, &mut ws, &s0, n_want, k, &opts));
    record_hill(&mut m, &ws);
    let outcome = match result {
        Ok(o) => o,
        Err(Error::MaxIterExceeded { iterations, partial }) => {
            if let PartialResult::Sadpa(o) = partial.as_ref() {
                write_sadpa(&out, sys, o, &mut m)?;
            }
            m.set("iterations", iterations);
            m.set("converged", false);
            m.write(&out)?;
            return Err(Error::MaxIterExceeded { iterations, partial }.into());
        }
        Err(e) => return Err(e.into()),
    };
    write_sadpa(&out, sys, &outcome, &mut m)?;
    m.set("iterations", outcome.iterations);
    m.set("converged", true);
    m.write(&out)
}

fn write_sadpa(out: &Path, sys: &LtpSystem, o: &SadpaOutcome, m: &mut Manifest) -> CliResult<()> {
    write_csv(
        &out.join("convergence.csv"),
        &["iteration", "shift_re", "shift_im", "residual", "residual_adj", "space_dim", "converged"],
        o.log.iter().map(|r| {
            vec![
                r.iteration.to_string(),
                fmt_f64(r.shift.re),
                fmt_f64(r.shift.im),
                fmt_f64(r.residual),
                fmt_f64(r.residual_adj),
                r.space_dim.to_string(),
                r.converged.to_string(),
            ]
        }),
    )?;
    if o.triples.is_empty() {
        return Ok(());
    }
    let triples: Vec<_> = o.triples.iter().map(|t| t.canonicalized()).collect();
    let pf = PartialFloquet::from_triples(&triples)?;
    pf.save(out.join("partial_floquet.json"))?;
    let rom = build_rom(&pf, sys)?;
    let table = port_extension(&rom, None)?.dominance_table()?;
    write_csv(
        &out.join("poles.csv"),
        &["lambda_re", "lambda_im", "dominance", "residual", "residual_adj", "iteration_found"],
        table.iter().map(|row| {
            let t = &triples[row.index];
            vec![
                fmt_f64(t.lambda.re),
                fmt_f64(t.lambda.im),
                fmt_f64(row.degdom_hext),
                fmt_f64(t.residual),
                fmt_f64(t.residual_adj),
                o.found_at[row.index].to_string(),
            ]
        }),
    )?;
    m.set("found", triples.len());
    m.set("real_part_cap", o.real_part_cap);
    m.set("max_constancy_error", triples.iter().map(|t| t.constancy_error(64)).fold(0.0, f64::max));
    Ok(())
}

fn build_rom_cmd(args: BuildRomArgs) -> CliResult<()> {
    let out = out_dir(&args.common)?;
    let mut m = Manifest::new("build-rom", &args);
    let loaded = load_system(&args.common, &out)?;
    m.set("source", &loaded.source);
    let path = args.partial_floquet.clone().unwrap_or_else(|| out.join("partial_floquet.json"));
    let pf = PartialFloquet::load(&path).map_err(|e| usage(format!("cannot load {}: {e}", path.display())))?;
    let rom = m.time("build", || build_rom(&pf, &loaded.sys))?;
    let ext = port_extension(&rom, args.k)?;
    rom.save(out.join("rom.json"))?;
    ext.save(out.join("extension.json"))?;
    write_dominance(&out.join("dominance.csv"), &ext)?;
    m.set("r", rom.r());
    m.set("K", ext.k);
    m.set("constancy_error", pf.constancy_error(64));
    m.set("mr_condition", {
        let sv = pf.mr.clone().svd(false, false).singular_values;
        sv.max() / sv.min()
    });
    m.write(&out)
}

fn write_dominance(path: &Path, ext: &LtiExtension) -> CliResult<()> {
    write_csv(
        path,
        &["lambda_re", "lambda_im", "degdom_hext", "degdom_g", "rank"],
        ext.dominance_table()?.iter().enumerate().map(|(rank, row)| {
            vec![
                fmt_f64(row.lambda.re),
                fmt_f64(row.lambda.im),
                fmt_f64(row.degdom_hext),
                fmt_f64(row.degdom_g),
                (rank + 1).to_string(),
            ]
        }),
    )
}

fn load_rom(path: Option<PathBuf>, out: &Path) -> CliResult<Rom> {
    let path = path.unwrap_or_else(|| out.join("rom.json"));
    Rom::load(&path).map_err(|e| usage(format!("cannot load {}: {e}; run build-rom first", path.display())))
}

fn simulate(args: SimulateArgs) -> CliResult<()> {
    let out = out_dir(&args.common)?;
    let mut m = Manifest::new("simulate", &args);
    let loaded = load_system(&args.common, &out)?;
    m.set("source", &loaded.source);
    let rom = load_rom(args.rom.clone(), &out)?;
    let u: InputSignal = args.input.as_deref().unwrap_or("exp:-1").parse().map_err(|e: Error| usage(e.to_string()))?;
    let t_end = args.t_end.unwrap_or(20.0);
    let points = args.points.unwrap_or(2000);
    if !(t_end > 0.0) || points < 2 {
        return Err(usage("need --t-end > 0 and --points >= 2"));
    }
    let tol = args.tol.unwrap_or(1e-12);
    let grid = uniform_grid(t_end, points);
    let full = m.time("fom", || match &loaded.gt {
        Some(gt) => simulate_fom_example(gt, &u, &grid).map_err(CliError::from),
        None if loaded.sys.n() <= MAX_DENSE_DIM => {
            let opts = RadauOptions {
                rtol: tol.max(1e-13),
                atol: 1e-2 * tol.max(1e-13),
                ..Default::default()
            };
            simulate_fom_dense(&loaded.sys, &u, &grid, &opts).map_err(CliError::from)
        }
        None => Err(usage(format!(
            "full-order simulation needs the benchmark example or n <= {MAX_DENSE_DIM}"
        ))),
    })?;
    let red = m.time("rom", || simulate_rom(&rom, &u, &grid, tol))?;
    let err = relative_error(&full.y, &red.y)?;
    write_csv(
        &out.join("sim.csv"),
        &["t", "y_re", "y_im", "yr_re", "yr_im", "relerr"],
        (0..grid.len()).map(|j| {
            vec![
                fmt_f64(grid[j]),
                fmt_f64(full.y[j].re),
                fmt_f64(full.y[j].im),
                fmt_f64(red.y[j].re),
                fmt_f64(red.y[j].im),
                fmt_f64(err.pointwise[j]),
            ]
        }),
    )?;
    m.set("fom_method", &full.method);
    m.set("fom_steps", full.steps);
    m.set("max_relerr", err.max);
    m.set("mean_relerr", err.mean);
    m.write(&out)
}

/// Extension of the full model: exact for the benchmark, from the dense
/// oracle for small systems.
fn full_extension(loaded: &Loaded, k: usize, m: &mut Manifest) -> CliResult<LtiExtension> {
    if let Some(gt) = &loaded.gt {
        return Ok(LtiExtension::from_ground_truth(gt, k)?);
    }
    if loaded.sys.n() > MAX_ORACLE_DIM {
        return Err(usage(format!(
            "the full extension needs the benchmark example or n <= {MAX_ORACLE_DIM}"
        )));
    }
    let rep = m.time("oracle", || dense_floquet_oracle(&loaded.sys))?;
    m.set("oracle_agreement", rep.agreement);
    let rom = build_rom(&PartialFloquet::from_triples(&rep.triples)?, &loaded.sys)?;
    let kk = rom.br.depth().max(rom.cr.depth()).max(k);
    Ok(LtiExtension::from_rom(&rom, kk)?)
}

fn hinf(args: HinfArgs) -> CliResult<()> {
    let out = out_dir(&args.common)?;
    let mut m = Manifest::new("hinf", &args);
    let loaded = load_system(&args.common, &out)?;
    m.set("source", &loaded.source);
    let rom = load_rom(args.rom.clone(), &out)?;
    let red = port_extension(&rom, args.k)?;
    let full = full_extension(&loaded, args.k.unwrap_or(1), &mut m)?;
    let grid = args.grid.grid();
    let norm = m.time("norm", || sampled_hinf_norm(&full, &grid))?;
    let err = m.time("error", || sampled_hinf_error(&full, &red, &grid))?;
    write_csv(
        &out.join("hinf_sweep.csv"),
        &["nu", "sigma_max_err"],
        err.sweep.iter().map(|(nu, s)| vec![fmt_f64(*nu), fmt_f64(*s)]),
    )?;
    m.set("K", full.k.max(red.k));
    m.set("r", red.order());
    m.set("hinf_full", norm.value);
    m.set("hinf_error", err.value);
    m.set("hinf_relative_error", err.value / norm.value);
    m.set("nu_peak", err.nu_peak);
    m.write(&out)
}

fn compare_bt(args: CompareBtArgs) -> CliResult<()> {
    let out = out_dir(&args.common)?;
    let mut m = Manifest::new("compare-bt", &args);
    let loaded = load_system(&args.common, &out)?;
    m.set("source", &loaded.source);
    let full = full_extension(&loaded, args.k.unwrap_or(1), &mut m)?;
    let max_order = args.max_order.unwrap_or(10).min(full.order());
    if max_order == 0 {
        return Err(usage("--max-order must be at least 1"));
    }
    let grid = args.grid.grid();
    let norm = sampled_hinf_norm(&full, &grid)?.value;
    let mut rows = Vec::with_capacity(max_order);
    let mut hsv = Vec::new();
    m.time("sweep", || -> CliResult<()> {
        for r in 1..=max_order {
            let dpt = sampled_hinf_error(&full, &full.dominant_truncation(r)?, &grid)?.value / norm;
            let bt = balanced_truncation(&full, r)?;
            let bte = sampled_hinf_error(&full, &bt.reduced, &grid)?.value / norm;
            hsv = bt.hsv;
            rows.push(vec![r.to_string(), fmt_f64(dpt), fmt_f64(bte)]);
        }
        Ok(())
    })?;
    write_csv(&out.join("bt_compare.csv"), &["order", "err_dpt", "err_bt"], rows)?;
    hsv.truncate(max_order + 1);
    m.set("K", full.k);
    m.set("hinf_full", norm);
    m.set("errors_are_relative", true);
    m.set("hankel_singular_values", hsv);
    m.write(&out)
}

fn phv_sweep(args: PhvArgs) -> CliResult<()> {
    let out = out_dir(&args.common)?;
    let mut m = Manifest::new("phv-sweep", &args);
    let loaded = load_system(&args.common, &out)?;
    m.set("source", &loaded.source);
    let sys = &loaded.sys;
    let mut ws = ResolventWorkspace::for_system(sys);
    let k = fourier_depth(sys, &mut ws, args.k)?;
    let grid = FrequencyGrid {
        lo_decade: args.nu_lo_decade.unwrap_or(-3.0),
        hi_decade: args.nu_hi_decade.unwrap_or(3.0),
        points: args.nu_points.unwrap_or(61),
        negative: false,
        refine_iters: 0,
    };
    let sigma = args.sigma.unwrap_or(0.0);
    let mut rows = Vec::new();
    m.time("sweep", || -> CliResult<()> {
        for nu in grid.frequencies() {
            let g = eval_phv(sys, &mut ws, Complex64::new(sigma, nu), k)?;
            for (j, z) in g.g.iter().enumerate() {
                let l = j as i64 - 2 * k as i64;
                rows.push(vec![fmt_f64(sigma), fmt_f64(nu), l.to_string(), fmt_f64(z.re), fmt_f64(z.im)]);
            }
        }
        Ok(())
    })?;
    write_csv(&out.join("phv.csv"), &["s_re", "s_im", "l", "g_re", "g_im"], rows)?;
    m.set("K", k);
    record_hill(&mut m, &ws);
    m.write(&out)
}

fn oracle_check(args: OracleArgs) -> CliResult<()> {
    let out = out_dir(&args.common)?;
    let mut m = Manifest::new("oracle-check", &args);
    let loaded = load_system(&args.common, &out)?;
    m.set("source", &loaded.source);
    if loaded.sys.n() > MAX_ORACLE_DIM {
        return Err(usage(format!("oracle-check supports n <= {MAX_ORACLE_DIM}")));
    }
    let rep: OracleReport = m.time("oracle", || dense_floquet_oracle(&loaded.sys))?;
    let omega = loaded.sys.omega();
    write_csv(
        &out.join("oracle.csv"),
        &["lambda_re", "lambda_im", "monodromy_re", "monodromy_im", "residual", "residual_adj"],
        rep.triples.iter().zip(&rep.monodromy_exponents).map(|(t, mu)| {
            let (mc, _) = canonicalize_lambda(*mu, omega);
            vec![
                fmt_f64(t.lambda.re),
                fmt_f64(t.lambda.im),
                fmt_f64(mc.re),
                fmt_f64(mc.im),
                fmt_f64(t.residual),
                fmt_f64(t.residual_adj),
            ]
        }),
    )?;
    let pass = rep.agreement < ORACLE_AGREEMENT_TOL && rep.triples.len() == loaded.sys.n();
    m.set("hill_depth", rep.hill_depth);
    m.set("agreement", rep.agreement);
    m.set("pass", pass);
    m.write(&out)?;
    println!(
        "{} oracle agreement {:.3e} (tolerance {:.0e}, {} exponents)",
        if pass { "PASS" } else { "FAIL" },
        rep.agreement,
        ORACLE_AGREEMENT_TOL,
        rep.triples.len()
    );
    if pass {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("oracles disagree by {:.3e}", rep.agreement)).into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let c = |re, im| Some(Complex64::new(re, im));
        assert_eq!(parse_complex("-0.1"), c(-0.1, 0.0));
        assert_eq!(parse_complex("-0.1,2"), c(-0.1, 2.0));
        assert_eq!(parse_complex("1e-3-2.5i"), c(1e-3, -2.5));
        assert_eq!(parse_complex("-1+i"), c(-1.0, 1.0));
        assert_eq!(parse_complex("3i"), c(0.0, 3.0));
        assert_eq!(parse_complex("x"), None);
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.0, -1e-4, 1e-10, 8.976949e-6, 17785.49, 1e300, -0.1, 1.0 / 3.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn example_spec_parsing() {
        let s = parse_example_spec("n=20,slow=-3:0").unwrap();
        assert_eq!((s.n, s.n_slow, s.slow_range), (20, 10, [-3.0, 0.0]));
        assert_eq!(parse_example_spec("n=4").unwrap().n_slow, 4);
        assert!(parse_example_spec("m=3").is_err());
    }

    #[test]
    fn config_fills_missing_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "tol = 1e-6\nn_want = 3\n[sadpa]\nmax_iter = 7\n").unwrap();
        let args = SadpaArgs {
            common: CommonArgs {
                config: Some(path),
                ..Default::default()
            },
            n_want: Some(4),
            ..Default::default()
        };
        let merged = merge_config("sadpa", args).unwrap();
        assert_eq!(merged.tol, Some(1e-6));
        assert_eq!(merged.n_want, Some(4));
        assert_eq!(merged.max_iter, Some(7));
    }
}
