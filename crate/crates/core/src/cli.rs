//! Command-line front end. Every command reads files (or fixture names),
//! writes deterministic outputs and a run manifest, and maps errors to
//! stable exit codes: 0 success, 2 input validation, 3 resource guard,
//! 4 internal failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::channel::{ChannelFile, ChannelSpec, DegradednessCertificate, DEGRADED_TOL};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::infotheory::{
    assemble_joint_degraded, assemble_joint_one_set, assemble_joint_outer, assemble_joint_two_set, AnyScheme,
    JointPMF,
};
use crate::optimizer::{assemble_region, maximize_secrecy_capacity, Bound, SearchConfig, Variant};
use crate::regions::{format_sig, frontier_csv};
use crate::wiretap_sim::{reports_csv, simulate, SimConfig, SimSummary};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "gmac", version, about = "Rate-equivocation regions and secrecy capacity for generalized MACs")]
pub struct Cli {
    /// Worker threads; defaults to the available hardware parallelism.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Assemble a region and write its frontier.
    Region(RegionArgs),
    /// Classify a channel as physically, stochastically or not degraded.
    CheckDegraded(CheckDegradedArgs),
    /// Best-found secrecy capacity at a common-message rate.
    SecrecyCapacity(SecrecyArgs),
    /// Exact small-blocklength code simulation.
    Simulate(SimulateArgs),
    /// Evaluate an entropy or mutual information on an assembled joint.
    Info(InfoArgs),
    /// Write a built-in channel as a channel file.
    Fixture(FixtureArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RegionArgs {
    /// Channel file, or the name of a built-in fixture.
    pub channel: String,
    #[arg(long)]
    pub bound: Bound,
    /// Search config JSON.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Two coordinates, e.g. `R0,R1`; defaults to the first two.
    #[arg(long)]
    pub plane: Option<String>,
    /// Fixed coordinate values, e.g. `--fix R2=0.1`.
    #[arg(long = "fix", value_name = "NAME=VALUE")]
    pub fix: Vec<String>,
    /// Number of sweep directions.
    #[arg(long, default_value_t = 33)]
    pub resolution: usize,
    /// Frontier CSV path; the witness sidecar and manifest are written next
    /// to it. Without it the CSV goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a plotting script for the CSV.
    #[arg(long, value_name = "SCRIPT")]
    pub emit_plot: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct CheckDegradedArgs {
    pub channel: String,
    #[arg(long, default_value_t = DEGRADED_TOL)]
    pub tol: f64,
}

#[derive(Args, Debug, Clone)]
pub struct SecrecyArgs {
    pub channel: String,
    #[arg(long, default_value_t = 0.0)]
    pub r0: f64,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Search the degraded-channel family instead of the general one.
    #[arg(long)]
    pub degraded: bool,
}

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    /// Simulation config JSON.
    pub config: PathBuf,
    /// Overrides the config's `channel` entry.
    #[arg(long)]
    pub channel: Option<String>,
    /// Per-seed CSV path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Report JSON path; stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct InfoArgs {
    pub channel: String,
    /// Scheme JSON, as found in witness files.
    #[arg(long)]
    pub scheme: PathBuf,
    /// `I(A;B|C)` or `H(A|B)`, variables comma-separated.
    #[arg(long)]
    pub query: String,
}

#[derive(Args, Debug, Clone)]
pub struct FixtureArgs {
    /// Fixture name; omit to list them.
    pub name: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Provenance record written with every output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub channel_digest: String,
    pub config_digest: Option<String>,
    pub tool_version: String,
    pub seeds: Vec<u64>,
    pub duration_seconds: f64,
    /// File name to sha256 of its content.
    pub outputs: Vec<(String, String)>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A channel and the digest of the bytes it came from.
pub struct LoadedChannel {
    pub spec: ChannelSpec,
    pub digest: String,
}

/// Reads a channel file; a missing path that names a fixture loads the
/// fixture instead, digested over its canonical file form.
pub fn load_channel(arg: &str) -> Result<LoadedChannel> {
    let path = Path::new(arg);
    if !path.exists() && fixtures::NAMES.contains(&arg) {
        let spec = fixtures::by_name(arg)?;
        let text = serde_json::to_string(&ChannelFile::from_spec(&spec))?;
        return Ok(LoadedChannel {
            spec,
            digest: sha256_hex(text.as_bytes()),
        });
    }
    let bytes = std::fs::read(path)?;
    let file: ChannelFile = serde_json::from_slice(&bytes)?;
    Ok(LoadedChannel {
        spec: file.into_spec()?,
        digest: sha256_hex(&bytes),
    })
}

fn load_config(path: Option<&Path>) -> Result<(SearchConfig, Option<String>)> {
    match path {
        None => Ok((SearchConfig::default(), None)),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            Ok((SearchConfig::from_json(&text)?, Some(sha256_hex(text.as_bytes()))))
        }
    }
}

fn parse_plane(plane: Option<&str>, bound: Bound) -> Result<(String, String)> {
    let coords = bound.coords();
    match plane {
        None => Ok((coords[0].to_string(), coords[1].to_string())),
        Some(p) => match p.split(',').map(str::trim).collect::<Vec<_>>()[..] {
            [a, b] => Ok((a.to_string(), b.to_string())),
            _ => Err(Error::Invalid(format!("--plane expects two comma-separated names, got `{p}`"))),
        },
    }
}

fn parse_fix(items: &[String]) -> Result<Vec<(String, f64)>> {
    items
        .iter()
        .map(|s| {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("--fix expects NAME=VALUE, got `{s}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("--fix value `{v}` is not a number")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

/// Everything `region` produces, before it is written anywhere.
#[derive(Clone, Debug)]
pub struct RegionOutput {
    pub csv: String,
    pub witnesses: Value,
    pub manifest: RunManifest,
}

pub fn cmd_region(args: &RegionArgs) -> Result<RegionOutput> {
    let start = Instant::now();
    let channel = load_channel(&args.channel)?;
    let (config, config_digest) = load_config(args.config.as_deref())?;
    let (a, b) = parse_plane(args.plane.as_deref(), args.bound)?;
    let fixed = parse_fix(&args.fix)?;
    let assembled = assemble_region(&channel.spec, args.bound, &config)?;
    let fixed_ref: Vec<(&str, f64)> = fixed.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let points = assembled.region.frontier((&a, &b), &fixed_ref, args.resolution)?;
    let csv = frontier_csv((&a, &b), &points);

    let region = &assembled.region;
    let frontier: Vec<Value> = points
        .iter()
        .map(|p| {
            let support: Vec<Value> = p
                .support
                .iter()
                .map(|&(weight, piece)| {
                    let scheme = region.provenance()[piece];
                    json!({
                        "weight": weight,
                        "piece": region.pieces()[piece].label(),
                        "scheme": scheme,
                    })
                })
                .collect();
            json!({ "plane": p.plane, "point": p.point, "support": support })
        })
        .collect();
    // only the schemes some frontier point uses
    let mut used: Vec<usize> = points
        .iter()
        .flat_map(|p| p.support.iter().map(|&(_, k)| region.provenance()[k]))
        .collect();
    used.sort_unstable();
    used.dedup();
    let schemes: serde_json::Map<String, Value> = used
        .iter()
        .map(|&i| Ok((i.to_string(), serde_json::to_value(&assembled.witnesses[i])?)))
        .collect::<Result<_>>()?;
    let witnesses = json!({
        "bound": args.bound.to_string(),
        "coords": region.coords(),
        "plane": [a, b],
        "fixed": fixed,
        "frontier": frontier,
        "schemes": schemes,
        "diagnostics": region.diagnostics,
    });
    let manifest = RunManifest {
        command: format!("region --bound {}", args.bound),
        channel_digest: channel.digest,
        config_digest,
        tool_version: VERSION.into(),
        seeds: vec![config.seed],
        duration_seconds: start.elapsed().as_secs_f64(),
        outputs: Vec::new(),
    };
    Ok(RegionOutput {
        csv,
        witnesses,
        manifest,
    })
}

/// `<out>` with its extension replaced by `suffix`.
fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}{suffix}"))
}

fn write_file(path: &Path, content: &str, manifest: &mut RunManifest) -> Result<()> {
    std::fs::write(path, content)?;
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    manifest.outputs.push((name, sha256_hex(content.as_bytes())));
    Ok(())
}

fn pretty<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

pub fn plot_script(csv: &Path, plane: (&str, &str)) -> String {
    format!(
        r#"# Plots a frontier CSV written by `gmac region`.
import csv
import matplotlib.pyplot as plt

with open({path:?}) as f:
    rows = list(csv.DictReader(f))
xs = [float(r[{a:?}]) for r in rows]
ys = [float(r[{b:?}]) for r in rows]
plt.plot(xs, ys, marker="o")
plt.xlabel({a:?})
plt.ylabel({b:?})
plt.grid(True)
plt.savefig({png:?}, dpi=150)
"#,
        path = csv.display().to_string(),
        a = plane.0,
        b = plane.1,
        png = csv.with_extension("png").display().to_string(),
    )
}

fn run_region(args: &RegionArgs) -> Result<()> {
    let mut out = cmd_region(args)?;
    let Some(path) = &args.out else {
        print!("{}", out.csv);
        return Ok(());
    };
    write_file(path, &out.csv, &mut out.manifest)?;
    write_file(&sibling(path, ".witnesses.json"), &pretty(&out.witnesses)?, &mut out.manifest)?;
    if let Some(script) = &args.emit_plot {
        let header = out.csv.lines().next().unwrap_or("R0,R1");
        let (a, b) = header.split_once(',').unwrap_or(("R0", "R1"));
        write_file(script, &plot_script(path, (a, b)), &mut out.manifest)?;
    }
    std::fs::write(sibling(path, ".manifest.json"), pretty(&out.manifest)?)?;
    Ok(())
}

#[derive(Serialize)]
struct CertificateReport<'a> {
    verdict: &'static str,
    residual: f64,
    witness: Option<Vec<Vec<f64>>>,
    tolerance: f64,
    manifest: &'a RunManifest,
}

pub fn cmd_check_degraded(args: &CheckDegradedArgs) -> Result<(DegradednessCertificate, RunManifest)> {
    let start = Instant::now();
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(Error::Invalid(format!("--tol must be positive, got {}", args.tol)));
    }
    let channel = load_channel(&args.channel)?;
    let cert = channel.spec.classify_degradedness(args.tol)?;
    Ok((
        cert,
        RunManifest {
            command: "check-degraded".into(),
            channel_digest: channel.digest,
            config_digest: None,
            tool_version: VERSION.into(),
            seeds: Vec::new(),
            duration_seconds: start.elapsed().as_secs_f64(),
            outputs: Vec::new(),
        },
    ))
}

pub fn cmd_secrecy_capacity(args: &SecrecyArgs) -> Result<Value> {
    let start = Instant::now();
    let channel = load_channel(&args.channel)?;
    let (config, config_digest) = load_config(args.config.as_deref())?;
    let variant = if args.degraded { Variant::Degraded } else { Variant::General };
    let outcome = maximize_secrecy_capacity(&channel.spec, args.r0, &config, variant)?;
    let mut warnings = Vec::new();
    if args.degraded && !channel.spec.classify_degradedness(DEGRADED_TOL)?.verdict.is_degraded() {
        warnings.push(crate::one_set_bounds::NOT_DEGRADED_WARNING);
    }
    let manifest = RunManifest {
        command: format!("secrecy-capacity --r0 {}", args.r0),
        channel_digest: channel.digest,
        config_digest,
        tool_version: VERSION.into(),
        seeds: vec![config.seed],
        duration_seconds: start.elapsed().as_secs_f64(),
        outputs: Vec::new(),
    };
    Ok(json!({
        "value": outcome.value,
        "r0": args.r0,
        "variant": if args.degraded { "degraded" } else { "general" },
        "evaluated": outcome.evaluated,
        "witness": outcome.scheme,
        "warnings": warnings,
        "manifest": manifest,
    }))
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<(SimSummary, RunManifest)> {
    let start = Instant::now();
    let text = std::fs::read_to_string(&args.config)?;
    let config = SimConfig::from_json(&text)?;
    let name = args
        .channel
        .clone()
        .or_else(|| config.channel.clone())
        .ok_or_else(|| Error::Invalid("no channel given in the config or on the command line".into()))?;
    // config-relative paths resolve against the config's directory
    let resolved = if args.channel.is_none() && !fixtures::NAMES.contains(&name.as_str()) {
        let base = args.config.parent().unwrap_or(Path::new("."));
        base.join(&name).to_string_lossy().into_owned()
    } else {
        name
    };
    let channel = load_channel(&resolved)?;
    let summary = simulate(&channel.spec, config.sizes, &config.input_dist, &config.seeds, config.construction)?;
    Ok((
        summary,
        RunManifest {
            command: "simulate".into(),
            channel_digest: channel.digest,
            config_digest: Some(sha256_hex(text.as_bytes())),
            tool_version: VERSION.into(),
            seeds: config.seeds.clone(),
            duration_seconds: start.elapsed().as_secs_f64(),
            outputs: Vec::new(),
        },
    ))
}

/// A parsed `I(A;B|C)` or `H(A|B)` query.
#[derive(Clone, Debug, PartialEq)]
pub enum Query {
    Entropy { target: Vec<String>, given: Vec<String> },
    Mutual { a: Vec<String>, b: Vec<String>, given: Vec<String> },
}

fn names(list: &str) -> Result<Vec<String>> {
    let out: Vec<String> = list.split(',').map(|s| s.trim().to_string()).collect();
    if out.iter().any(|s| s.is_empty()) {
        return Err(Error::Invalid(format!("empty variable name in `{list}`")));
    }
    Ok(out)
}

impl Query {
    pub fn parse(text: &str) -> Result<Self> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Invalid(format!("cannot parse query `{text}`; expected I(A;B|C) or H(A|B)"));
        let (head, body) = t.split_at(t.find('(').ok_or_else(bad)?);
        let body = body.strip_prefix('(').and_then(|b| b.strip_suffix(')')).ok_or_else(bad)?;
        let (main, given) = match body.split_once('|') {
            Some((m, g)) => (m, names(g)?),
            None => (body, Vec::new()),
        };
        match head {
            "H" if !main.contains(';') => Ok(Query::Entropy {
                target: names(main)?,
                given,
            }),
            "I" => {
                let (a, b) = main.split_once(';').ok_or_else(bad)?;
                Ok(Query::Mutual {
                    a: names(a)?,
                    b: names(b)?,
                    given,
                })
            }
            _ => Err(bad()),
        }
    }

    pub fn evaluate(&self, joint: &JointPMF) -> Result<f64> {
        match self {
            Query::Entropy { target, given } => joint.entropy(target, given),
            Query::Mutual { a, b, given } => joint.mutual_information(a, b, given),
        }
    }
}

pub fn joint_of(scheme: &AnyScheme, channel: &ChannelSpec) -> Result<JointPMF> {
    match scheme {
        AnyScheme::OneSet(s) => assemble_joint_one_set(s, channel),
        AnyScheme::OneSetOuter(s) => assemble_joint_outer(s, channel),
        AnyScheme::TwoSet(s) => assemble_joint_two_set(s, channel),
        AnyScheme::Degraded(s) => assemble_joint_degraded(s, channel),
    }
}

pub fn cmd_info(args: &InfoArgs) -> Result<f64> {
    let channel = load_channel(&args.channel)?;
    let scheme: AnyScheme = serde_json::from_str(&std::fs::read_to_string(&args.scheme)?)?;
    let query = Query::parse(&args.query)?;
    let joint = joint_of(&scheme, &channel.spec)?;
    let v = query.evaluate(&joint)?;
    // entropies are nonnegative; clear rounding below zero
    Ok(if v.abs() < 1e-12 { 0.0 } else { v })
}

fn run_fixture(args: &FixtureArgs) -> Result<()> {
    let Some(name) = &args.name else {
        for n in fixtures::NAMES {
            println!("{n}");
        }
        return Ok(());
    };
    let text = pretty(&ChannelFile::from_spec(&fixtures::by_name(name)?))?;
    match &args.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Region(a) => run_region(a),
        Command::CheckDegraded(a) => {
            let (cert, manifest) = cmd_check_degraded(a)?;
            let report = CertificateReport {
                verdict: cert.verdict.as_str(),
                residual: cert.residual,
                witness: cert.witness.as_ref().map(|k| k.to_rows()),
                tolerance: a.tol,
                manifest: &manifest,
            };
            print!("{}", pretty(&report)?);
            Ok(())
        }
        Command::SecrecyCapacity(a) => {
            print!("{}", pretty(&cmd_secrecy_capacity(a)?)?);
            Ok(())
        }
        Command::Simulate(a) => {
            let (summary, mut manifest) = cmd_simulate(a)?;
            if let Some(p) = &a.csv {
                write_file(p, &reports_csv(&summary.reports), &mut manifest)?;
            }
            let report = pretty(&json!({ "summary": summary, "manifest": manifest }))?;
            match &a.out {
                Some(p) => std::fs::write(p, report)?,
                None => print!("{report}"),
            }
            Ok(())
        }
        Command::Info(a) => {
            println!("{}", format_sig(cmd_info(a)?, 9));
            Ok(())
        }
        Command::Fixture(a) => run_fixture(a),
    }
}

/// Machine-readable error record for the error stream.
pub fn error_json(e: &Error) -> Value {
    json!({ "error": e.kind(), "message": e.to_string(), "exit_code": e.exit_code() })
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            let e = Error::Invalid("--jobs must be at least 1".into());
            eprintln!("{}", error_json(&e));
            return e.exit_code();
        }
        // fails only if a pool already exists, which keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let outcome = std::panic::catch_unwind(|| dispatch(&cli));
    match outcome {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("{}", error_json(&e));
            e.exit_code()
        }
        Err(_) => {
            let e = Error::Internal("panic during command".into());
            eprintln!("{}", error_json(&e));
            e.exit_code()
        }
    }
}
