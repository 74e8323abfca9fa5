//! Command-line front end: instance parsing, single-instance queries,
//! sweeps and the example fixtures.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::apery::{self, Limits, DEFAULT_L_MAX};
use crate::classify::{self, Ladder};
use crate::error::Error;
use crate::harness::{self, fixtures, SweepSpec, SweepSummary};
use crate::lattice::{AffineSemigroup, LatticeVector};
use crate::membership::{MembershipEngine, DEFAULT_BOX_BUDGET};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Environment variable that takes precedence over `--jobs`.
pub const JOBS_ENV: &str = "SGCLASS_JOBS";

#[derive(Debug, Parser)]
#[command(name = "sgclass", version, about = "Classify simplicial affine semigroups")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Search cap for the l_i bounds.
    #[arg(long, default_value_t = DEFAULT_L_MAX, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub l_max: u64,
    /// Largest reachability table, in cells.
    #[arg(long, default_value_t = DEFAULT_BOX_BUDGET, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub box_budget: u64,
    /// Worker threads for sweeps; SGCLASS_JOBS overrides it.
    #[arg(long, default_value_t = 1, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full classification report.
    Analyze(InstanceArgs),
    /// Apéry set, maximal elements and representations.
    Apery(InstanceArgs),
    /// Membership of a point, decided by both engines.
    Member(PointArgs),
    /// Trace-ideal membership of a point of S.
    Trace(PointArgs),
    /// Exhaustive or random sweep with theorem checks.
    Sweep(SweepArgs),
    /// Recompute the worked examples and compare with their stated data.
    VerifyPaper(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// JSON file of the form {"generators": [[6,0],[0,6],...]}.
    pub file: Option<PathBuf>,
    /// Inline generators, e.g. "6,0;0,6;2,1;1,2".
    #[arg(long, conflicts_with = "file")]
    pub gens: Option<String>,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// The query vector, e.g. "4,2".
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 6)]
    pub max_coord: i64,
    /// Inclusive codimension range "lo..hi", or a single value.
    #[arg(long, default_value = "2..3")]
    pub codim: String,
    /// Draw this many random instances instead of enumerating.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub count_limit: Option<usize>,
    /// JSONL output path; "-" for stdout.
    #[arg(long)]
    pub jsonl: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Alter the expectations of the named fixture, to exercise the diff output.
    #[arg(long, hide = true)]
    pub corrupt_fixture: Option<String>,
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn bad_input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_BAD_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            _ if e.is_resource_limit() => EXIT_RESOURCE,
            Error::Contradiction { .. } => EXIT_VIOLATION,
            _ => EXIT_BAD_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::bad_input(format!("i/o error: {e}"))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    generators: Vec<Vec<i64>>,
}

fn parse_vector(text: &str) -> Result<LatticeVector, Failure> {
    let coords = text
        .split(',')
        .map(|c| c.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::bad_input(format!("bad vector {text:?}: {e}")))?;
    Ok(LatticeVector::from(coords))
}

/// Generators from `"6,0;0,6;2,1;1,2"`.
pub fn parse_generators(text: &str) -> Result<Vec<LatticeVector>, Failure> {
    text.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(parse_vector)
        .collect()
}

fn load_instance(args: &InstanceArgs) -> Result<AffineSemigroup, Failure> {
    let gens = match (&args.file, &args.gens) {
        (_, Some(g)) => parse_generators(g)?,
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::bad_input(format!("cannot read {}: {e}", path.display())))?;
            let file: InstanceFile = serde_json::from_str(&text)
                .map_err(|e| Failure::bad_input(format!("bad instance file {}: {e}", path.display())))?;
            file.generators.into_iter().map(LatticeVector::from).collect()
        }
        (None, None) => return Err(Failure::bad_input("give an instance file or --gens")),
    };
    Ok(AffineSemigroup::build(&gens).map_err(Error::from)?)
}

fn parse_codim(text: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::bad_input(format!("bad codimension range {text:?}"));
    let (lo, hi) = match text.split_once("..") {
        Some((lo, hi)) => (lo, hi.strip_prefix('=').unwrap_or(hi)),
        None => (text, text),
    };
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

/// Renders a JSON object as aligned `key value` lines, one per top-level
/// key, values in compact JSON.
pub fn to_text(value: &Value) -> String {
    match value {
        Value::Object(map) => {
            let width = map.keys().map(|k| k.len()).max().unwrap_or(0);
            map.iter()
                .map(|(k, v)| format!("{k:<width$}  {v}\n"))
                .collect()
        }
        other => format!("{other}\n"),
    }
}

/// Inverse of [`to_text`].
pub fn parse_text(text: &str) -> Option<Value> {
    let mut map = serde_json::Map::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let (k, v) = line.split_once(' ')?;
        map.insert(k.to_string(), serde_json::from_str(v.trim()).ok()?);
    }
    Some(Value::Object(map))
}

fn render(value: &Value, format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(value).expect("json values print")),
        Format::Text => to_text(value),
    }
}

fn resolve_jobs(flag: u64) -> Result<usize, Failure> {
    match std::env::var(JOBS_ENV) {
        Ok(s) if !s.trim().is_empty() => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Failure::bad_input(format!("{JOBS_ENV} must be a positive integer, got {s:?}"))),
        },
        _ => Ok(flag as usize),
    }
}

/// Runs a parsed command, writing results to `out` and diagnostics to
/// `err`; returns the exit code.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let limits = Limits {
        l_max: cli.l_max,
        box_budget: cli.box_budget,
    };
    match &cli.command {
        Command::Analyze(a) => {
            let s = load_instance(a)?;
            let report = classify::classification_report(&s, &limits)?;
            let value = serde_json::to_value(&report).expect("reports serialize");
            out.write_all(render(&value, cli.format).as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Apery(a) => {
            let s = load_instance(a)?;
            let ap = apery::compute_apery(&s, &limits)?;
            let reps: Vec<Value> = ap
                .all_reps()
                .iter()
                .map(|(w, r)| json!({ "element": w, "reps": r }))
                .collect();
            let value = json!({
                "others": s.others(),
                "extremal": s.extremal(),
                "l_bounds": ap.l_bounds(),
                "elements": ap.elements(),
                "maximal": ap.maximal(),
                "reps": reps,
            });
            out.write_all(render(&value, cli.format).as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Member(p) => {
            let s = load_instance(&p.instance)?;
            let z = parse_vector(&p.point)?;
            let ap = apery::compute_apery(&s, &limits)?;
            let engine = MembershipEngine::with_apery(&s, &ap).with_budget(limits.box_budget);
            let by_apery = engine.member_apery(&z)?;
            let by_dp = engine.member_dp(&z)?;
            let value = json!({
                "point": z,
                "member_apery": by_apery,
                "member_dp": by_dp,
                "agree": by_apery == by_dp,
            });
            out.write_all(render(&value, cli.format).as_bytes())?;
            if by_apery != by_dp {
                writeln!(err, "engines disagree on {z}")?;
                return Ok(EXIT_VIOLATION);
            }
            Ok(EXIT_OK)
        }
        Command::Trace(p) => {
            let s = load_instance(&p.instance)?;
            let z = parse_vector(&p.point)?;
            let ap = apery::compute_apery(&s, &limits)?;
            let ladder = Ladder::new(&s, &ap)?;
            let q = ladder.in_trace(&z)?;
            let witness = q.witness_index.map(|i| &ap.maximal()[i]);
            let verdict = if q.in_trace() { "in tr(S)" } else { "not in tr(S)" };
            let value = json!({
                "point": z,
                "in_trace": q.in_trace(),
                "witness_index": q.witness_index,
                "witness": witness,
                "verdict": verdict,
            });
            out.write_all(render(&value, cli.format).as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Sweep(a) => run_sweep_command(a, &limits, resolve_jobs(cli.jobs)?, cli.format, out, err),
        Command::VerifyPaper(v) => {
            let mut list = fixtures::registry();
            if let Some(name) = &v.corrupt_fixture {
                let f = list
                    .iter_mut()
                    .find(|f| &f.name == name)
                    .ok_or_else(|| Failure::bad_input(format!("no fixture named {name:?}")))?;
                fixtures::corrupt(f);
            }
            let results = fixtures::run_fixtures_with(&list, &limits);
            let passed = results.iter().filter(|r| r.passed).count();
            match cli.format {
                Format::Json => {
                    let value = json!({
                        "fixtures": results,
                        "passed": passed,
                        "total": results.len(),
                    });
                    out.write_all(render(&value, Format::Json).as_bytes())?;
                }
                Format::Text => {
                    for r in &results {
                        writeln!(out, "{} {}", if r.passed { "PASS" } else { "FAIL" }, r.name)?;
                        for d in &r.diffs {
                            writeln!(out, "  {}: expected {}, observed {}", d.field, d.expected, d.observed)?;
                        }
                    }
                    writeln!(out, "{passed}/{} fixtures passed", results.len())?;
                }
            }
            Ok(if passed == results.len() { EXIT_OK } else { EXIT_VIOLATION })
        }
    }
}

fn run_sweep_command(
    a: &SweepArgs,
    limits: &Limits,
    jobs: usize,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let codim = parse_codim(&a.codim)?;
    let spec = match a.random {
        Some(n) => SweepSpec::random(a.d, a.max_coord, codim, a.seed.unwrap_or(0), a.count_limit.map_or(n, |c| c.min(n))),
        None => SweepSpec {
            count_limit: a.count_limit,
            ..SweepSpec::exhaustive(a.d, a.max_coord, codim)
        },
    };
    if a.seed.is_some() && a.random.is_none() {
        return Err(Failure::bad_input("--seed needs --random"));
    }
    spec.validate().map_err(Failure::bad_input)?;

    let start = Instant::now();
    let summary = {
        let mut to_stdout = false;
        let jsonl: Option<Box<dyn Write>> = match &a.jsonl {
            Some(p) if p.as_os_str() == "-" => {
                to_stdout = true;
                None
            }
            Some(p) => Some(Box::new(BufWriter::new(create(p)?))),
            None => None,
        };
        let csv: Option<Box<dyn Write>> = match &a.csv {
            Some(p) => Some(Box::new(BufWriter::new(create(p)?))),
            None => None,
        };
        if to_stdout {
            harness::run_sweep_to(&spec, limits, jobs, Some(&mut *out), csv)?
        } else {
            harness::run_sweep_to(&spec, limits, jobs, jsonl, csv)?
        }
    };
    write_summary(&summary, start.elapsed().as_secs_f64(), format, err)?;
    Ok(if !summary.violations.is_empty() {
        EXIT_VIOLATION
    } else if summary.errors > 0 {
        EXIT_RESOURCE
    } else {
        EXIT_OK
    })
}

fn create(path: &PathBuf) -> Result<File, Failure> {
    File::create(path).map_err(|e| Failure::bad_input(format!("cannot create {}: {e}", path.display())))
}

fn write_summary(summary: &SweepSummary, seconds: f64, format: Format, err: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Json => {
            let mut value = serde_json::to_value(summary).expect("summaries serialize");
            value["seconds"] = json!(seconds);
            writeln!(err, "{}", serde_json::to_string_pretty(&value).expect("json values print"))
        }
        Format::Text => {
            writeln!(
                err,
                "{} instances, {} violations, {} errors in {seconds:.1}s",
                summary.instances,
                summary.violations.len(),
                summary.errors
            )?;
            writeln!(
                err,
                "cohen-macaulay {}, gorenstein {}, nearly gorenstein {}, gps {}",
                summary.cohen_macaulay, summary.gorenstein, summary.nearly_gorenstein, summary.gps
            )?;
            for (name, t) in &summary.checks {
                writeln!(err, "  {name}: passed {}, skipped {}, failed {}", t.passed, t.skipped, t.failed)?;
            }
            let hist: Vec<String> = summary.type_histogram.iter().map(|(t, n)| format!("{t}:{n}")).collect();
            writeln!(err, "type histogram {}", hist.join(" "))?;
            for v in &summary.violations {
                writeln!(
                    err,
                    "VIOLATION {} on {}: expected {}, observed {}",
                    v.property_name,
                    harness::format_generators(&v.instance),
                    v.expected,
                    v.observed
                )?;
            }
            Ok(())
        }
    }
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_OK };
        }
    };
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = execute(&cli, &mut out, &mut err);
    let _ = out.flush();
    code
}
