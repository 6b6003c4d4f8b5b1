use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use colourer::engine::{
    thomassen_five, verify_colouring, FailureWitness, Theorem2Engine, Theorem2Outcome, TraceRecord,
};
use colourer::enumerate::{
    gen_disk_triangulations, gen_plane_triangulations, run_harness_with, write_planar_code, AssignmentMode, Check,
    ExclusionMode, HarnessConfig, RunOptions,
};
use colourer::graph::io::{graph_to_json, to_dot};
use colourer::graph::{EmbeddedGraph, NearTriangulation};
use colourer::lists::{Colouring, ListAssignment};
use colourer::oracle::first_colouring;

const VERSION: &str = env!("CARGO_PKG_VERSION");

const EXIT_INPUT: u8 = 1;
const EXIT_FAILURE: u8 = 2;
const EXIT_COUNTEREXAMPLE: u8 = 3;

#[derive(Parser)]
#[command(name = "colourer", version, about = "List-colouring of plane near-triangulations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    Theorem2,
    Thomassen5,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    #[value(name = "planar_code")]
    PlanarCode,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Exclusion {
    Enforced,
    Relaxed,
    Both,
}

#[derive(Subcommand)]
enum Cmd {
    /// Colour a near-triangulation from its lists.
    Colour {
        graph: PathBuf,
        lists: PathBuf,
        #[arg(long, value_enum, default_value = "theorem2")]
        algorithm: Algorithm,
        /// Complete with the oracle if the recursion stops.
        #[arg(long)]
        fallback: bool,
        /// Allow the list `L0 \ {alpha}` at v3.
        #[arg(long)]
        no_exclusion: bool,
        /// Write the recursion trace here as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check a colouring against a graph and its lists.
    Verify { graph: PathBuf, lists: PathBuf, colouring: PathBuf },
    /// Run the exhaustive harness and print its report.
    Falsify {
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        /// Outer cycle lengths: `K` or `A..B`.
        #[arg(long, default_value = "3..11")]
        k: String,
        /// Comma-separated checks; all by default.
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        /// Assignments drawn per instance above `--exhaustive-max-n`.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 7)]
        exhaustive_max_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "COLOURER_JOBS", default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value = "enforced")]
        exclusion: Exclusion,
        /// Defaults to `--max-n`.
        #[arg(long)]
        condition_max_n: Option<usize>,
        /// Defaults to `--max-n`.
        #[arg(long)]
        four_colour_max_n: Option<usize>,
        #[arg(long, default_value_t = 1)]
        thomassen_samples: usize,
        #[arg(long, default_value_t = 5)]
        thomassen_universe: u8,
        /// Wheel rim lengths.
        #[arg(long, value_delimiter = ',', default_value = "4,6")]
        wheels: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        max_witnesses: usize,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, requires = "checkpoint")]
        resume: bool,
        /// Write the report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate triangulations, or disks when `--k` is given.
    Enumerate {
        #[arg(long)]
        max_n: usize,
        #[arg(long)]
        k: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

struct Fail(u8, String);

impl Fail {
    fn input(m: impl ToString) -> Self {
        Fail(EXIT_INPUT, m.to_string())
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::input(format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Fail> {
    serde_json::from_str(&read(path)?).map_err(|e| Fail::input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Fail> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| Fail::input(format!("{}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(bytes).and_then(|_| so.flush()).map_err(|e| Fail::input(e.to_string()))
        }
    }
}

fn print_json(v: &Value) -> Result<(), Fail> {
    let mut s = serde_json::to_string_pretty(v).expect("json value");
    s.push('\n');
    emit(None, s.as_bytes())
}

fn parse_range(s: &str) -> Result<(usize, usize), Fail> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| Fail::input(format!("bad range {s:?}")));
    match s.split_once("..") {
        Some((a, b)) => Ok((num(a)?, num(b.trim_start_matches('='))?)),
        None => num(s).map(|k| (k, k)),
    }
}

fn write_trace(path: &Path, trace: &[TraceRecord]) -> Result<(), Fail> {
    let mut s = String::new();
    for r in trace {
        s.push_str(&serde_json::to_string(r).expect("trace record"));
        s.push('\n');
    }
    emit(Some(path), s.as_bytes())
}

/// SHA-256 of the settings that shape a single-instance run.
fn config_hash(settings: &Value) -> String {
    hex::encode(Sha256::digest(settings.to_string().as_bytes()))
}

fn colouring_json(settings: &Value, c: &Colouring, extra: Value) -> Value {
    let mut v = json!({
        "tool_version": VERSION,
        "config_hash": config_hash(settings),
        "settings": settings,
        "colouring": c,
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

fn witness_json(settings: &Value, w: &FailureWitness) -> Value {
    json!({ "tool_version": VERSION, "config_hash": config_hash(settings), "settings": settings, "witness": w })
}

fn colour(
    graph: &Path,
    lists: &Path,
    algorithm: Algorithm,
    fallback: bool,
    no_exclusion: bool,
    trace: Option<&Path>,
) -> Result<(), Fail> {
    let g: EmbeddedGraph = parse(graph)?;
    let mut a: ListAssignment = parse(lists)?;
    if no_exclusion {
        a = a.without_exclusion();
    }
    let name = algorithm.to_possible_value().expect("named").get_name().to_string();
    let settings = json!({ "algorithm": name, "fallback": fallback, "exclusion": !no_exclusion });
    match algorithm {
        Algorithm::Oracle => match first_colouring(&g, &a) {
            Some(c) => print_json(&colouring_json(&settings, &c, json!({}))),
            None => {
                print_json(
                    &json!({ "tool_version": VERSION, "config_hash": config_hash(&settings), "settings": settings, "satisfiable": false }),
                )?;
                Err(Fail(EXIT_FAILURE, "no list colouring exists".into()))
            }
        },
        Algorithm::Thomassen5 => {
            let nt = NearTriangulation::validate(g).map_err(Fail::input)?;
            let c = thomassen_five(&nt, &a).map_err(|e| Fail(EXIT_FAILURE, e.to_string()))?;
            print_json(&colouring_json(&settings, &c, json!({})))
        }
        Algorithm::Theorem2 => {
            let nt = NearTriangulation::validate(g).map_err(Fail::input)?;
            let engine = Theorem2Engine::new(&nt);
            let (outcome, records) = engine.colour_traced(&a).map_err(Fail::input)?;
            if let Some(p) = trace {
                write_trace(p, &records)?;
            }
            match outcome {
                Theorem2Outcome::Coloured(c) => print_json(&colouring_json(&settings, &c, json!({}))),
                Theorem2Outcome::Failed(w) => match fallback.then(|| first_colouring(nt.graph(), &a)).flatten() {
                    Some(c) => print_json(&colouring_json(&settings, &c, json!({ "fallback": true, "witness": w }))),
                    None => {
                        print_json(&witness_json(&settings, &w))?;
                        Err(Fail(EXIT_FAILURE, format!("recursion stopped: {}", w.reason.label())))
                    }
                },
            }
        }
    }
}

fn verify(graph: &Path, lists: &Path, colouring: &Path) -> Result<(), Fail> {
    let g: EmbeddedGraph = parse(graph)?;
    let nt = NearTriangulation::validate(g).map_err(Fail::input)?;
    let a: ListAssignment = parse(lists)?;
    let c: Colouring = parse(colouring)?;
    match verify_colouring(&nt, &a, &c) {
        Ok(()) => print_json(&json!({ "tool_version": VERSION, "valid": true })),
        Err(v) => {
            print_json(&json!({ "tool_version": VERSION, "valid": false, "violation": v }))?;
            Err(Fail(EXIT_FAILURE, v.to_string()))
        }
    }
}

fn enumerate(max_n: usize, k: Option<&str>, format: Format, output: Option<&Path>) -> Result<(), Fail> {
    let graphs: Vec<EmbeddedGraph> = match k {
        None => gen_plane_triangulations(max_n).map_err(Fail::input)?.into_iter().map(|t| t.graph().clone()).collect(),
        Some(k) => {
            let (a, b) = parse_range(k)?;
            gen_disk_triangulations(max_n, a..=b)
                .map_err(Fail::input)?
                .into_iter()
                .map(|c| c.disk.graph().clone())
                .collect()
        }
    };
    let bytes = match format {
        Format::PlanarCode => write_planar_code(graphs.iter()),
        Format::Json => graphs.iter().map(|g| graph_to_json(g) + "\n").collect::<String>().into_bytes(),
        Format::Dot => {
            graphs.iter().enumerate().map(|(i, g)| to_dot(g, &format!("g{i}"))).collect::<String>().into_bytes()
        }
    };
    emit(output, &bytes)?;
    eprintln!("{} graphs", graphs.len());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn falsify(
    max_n: usize,
    k: &str,
    checks: &[String],
    sample: Option<usize>,
    exhaustive_max_n: usize,
    seed: u64,
    jobs: usize,
    exclusion: Exclusion,
    condition_max_n: Option<usize>,
    four_colour_max_n: Option<usize>,
    thomassen_samples: usize,
    thomassen_universe: u8,
    wheels: Vec<usize>,
    max_witnesses: usize,
    checkpoint: Option<PathBuf>,
    resume: bool,
    output: Option<&Path>,
) -> Result<(), Fail> {
    let checks = if checks.is_empty() {
        Check::ALL.into_iter().collect()
    } else {
        checks
            .iter()
            .map(|c| Check::parse(c.trim()).ok_or_else(|| Fail::input(format!("unknown check {c:?}"))))
            .collect::<Result<_, _>>()?
    };
    let cfg = HarnessConfig {
        max_n,
        k_range: parse_range(k)?,
        assignment_mode: match sample {
            Some(count) => AssignmentMode::Sample { count },
            None => AssignmentMode::Exhaustive,
        },
        exhaustive_max_n,
        seed,
        checks,
        exclusion: match exclusion {
            Exclusion::Enforced => ExclusionMode::Enforced,
            Exclusion::Relaxed => ExclusionMode::Relaxed,
            Exclusion::Both => ExclusionMode::Both,
        },
        condition_max_n: condition_max_n.unwrap_or(max_n),
        four_colour_max_n: four_colour_max_n.unwrap_or(max_n),
        thomassen_samples,
        thomassen_universe,
        wheel_ks: wheels,
        max_witnesses,
        jobs,
    };
    let report = run_harness_with(&cfg, &RunOptions { checkpoint, resume }).map_err(Fail::input)?;
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    emit(output, text.as_bytes())?;
    for (check, r) in &report.checks {
        let t = r.summary.totals;
        eprintln!("{}: {:?} ({} instances, {} failures)", check.name(), r.verdict, t.instances, t.failures);
    }
    if report.any_counterexample() {
        return Err(Fail(EXIT_COUNTEREXAMPLE, "counterexample found".into()));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Fail> {
    match cli.cmd {
        Cmd::Colour { graph, lists, algorithm, fallback, no_exclusion, trace } => {
            colour(&graph, &lists, algorithm, fallback, no_exclusion, trace.as_deref())
        }
        Cmd::Verify { graph, lists, colouring } => verify(&graph, &lists, &colouring),
        Cmd::Enumerate { max_n, k, format, output } => enumerate(max_n, k.as_deref(), format, output.as_deref()),
        Cmd::Falsify {
            max_n,
            k,
            checks,
            sample,
            exhaustive_max_n,
            seed,
            jobs,
            exclusion,
            condition_max_n,
            four_colour_max_n,
            thomassen_samples,
            thomassen_universe,
            wheels,
            max_witnesses,
            checkpoint,
            resume,
            output,
        } => falsify(
            max_n,
            &k,
            &checks,
            sample,
            exhaustive_max_n,
            seed,
            jobs,
            exclusion,
            condition_max_n,
            four_colour_max_n,
            thomassen_samples,
            thomassen_universe,
            wheels,
            max_witnesses,
            checkpoint,
            resume,
            output.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
