//! `afgraph`: diagrams, telescopes, separation and graph realizations from
//! the command line.
//!
//! Exit codes: 0 success, 1 validation or verification failure, 2 parse or
//! input error, 3 precondition failure, 4 not enough levels.

use std::fs;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use afgraph::decide::{classify, realize_auto};
use afgraph::dot::{diagram_to_dot, graph_to_dot};
use afgraph::fixtures::{fixture, Fixture, FixtureName};
use afgraph::ideals::{auto_ideal, is_unital, recognize_separated, UnitalStatus};
use afgraph::io::{parse_diagram, parse_graph, parse_k0_vector, parse_realized, to_pretty, ToJson};
use afgraph::ktheory::{corner_graph, monoid_contains, unit_normalize, K0Vector};
use afgraph::random::{random_diagram, RandomParams};
use afgraph::realize::{realize_separated, realize_strict, verify_realization, RealizedGraph};
use afgraph::separation::{properify, separate};
use afgraph::{telescope, BratteliDiagram, Error, MultGraph, Subsequence};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use serde_json::{json, Value};

type D = BratteliDiagram<BigUint>;
type G = MultGraph<BigUint>;

#[derive(Parser)]
#[command(name = "afgraph", version, about = "Bratteli diagrams and graph realizations")]
struct Cli {
    /// Number of diagram levels to examine.
    #[arg(long, global = true, default_value_t = 4)]
    depth: usize,
    /// Seed for `gen --random`.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the diagram axioms.
    Validate(InArg),
    /// Telescope along a subsequence of levels.
    Telescope(TelescopeArgs),
    /// Report unitality, separated structure and M_k tail.
    Analyze(InArg),
    /// Telescope into M_k-separated form using the automatic ideal.
    Separate(InArg),
    /// Produce an equivalent proper M_k-separated diagram.
    Properify(ProperifyArgs),
    /// Build the realizing graph.
    Realize(RealizeArgs),
    /// Check a realization against its diagram.
    Verify(VerifyArgs),
    /// Classify and optionally realize.
    Decide(DecideArgs),
    /// K₀ monoid computations on amplified graphs.
    K0(K0Args),
    /// Emit a fixture or a seeded random diagram.
    Gen(GenArgs),
    /// Graphviz rendering of a diagram or graph.
    ExportDot(DotArgs),
}

#[derive(Args)]
struct InArg {
    /// Diagram JSON file.
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args)]
struct TelescopeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Explicit levels, e.g. `1,3,5`.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["start", "step"])]
    levels: Option<Vec<usize>>,
    /// First level of an arithmetic subsequence.
    #[arg(long, default_value_t = 1)]
    start: usize,
    /// Step of an arithmetic subsequence.
    #[arg(long, default_value_t = 1)]
    step: usize,
    /// Materialize the result to `--depth` levels.
    #[arg(long)]
    materialize: bool,
}

#[derive(Args)]
struct ProperifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Also write the construction trace.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Separated,
    Strict,
    Auto,
}

#[derive(Args)]
struct RealizeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    mode: Mode,
}

#[derive(Args)]
struct VerifyArgs {
    /// Realization document written by `realize`.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    diagram: PathBuf,
}

#[derive(Args)]
struct DecideArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Also realize and verify when a constructive case applies.
    #[arg(long)]
    realize: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum K0Op {
    Member,
    Normalize,
    Corner,
}

#[derive(Args)]
struct K0Args {
    #[arg(value_enum)]
    op: K0Op,
    /// Amplified graph JSON file.
    #[arg(long)]
    graph: PathBuf,
    /// Vector as JSON, e.g. `{"v":3,"w":2}`.
    #[arg(long)]
    vector: String,
}

#[derive(Args)]
struct GenArgs {
    /// One of F, A, B, E, M3, corner32.
    #[arg(long, conflicts_with = "random")]
    fixture: Option<String>,
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 6)]
    levels: usize,
    #[arg(long, default_value_t = 4)]
    max_width: usize,
    #[arg(long, default_value_t = 3)]
    max_mult: u64,
    #[arg(long)]
    strict: bool,
    /// Generate a proper M_k-separated diagram with this k.
    #[arg(long)]
    separated: Option<u64>,
}

#[derive(Args)]
struct DotArgs {
    /// Diagram JSON file.
    #[arg(long = "in", conflicts_with = "graph", required_unless_present = "graph")]
    input: Option<PathBuf>,
    /// Graph or realization JSON file.
    #[arg(long)]
    graph: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. } => 2,
            Error::InvalidDiagram(_) | Error::InvalidGraph(_) | Error::Verification(_) => 1,
            Error::InsufficientLevels { .. } => 4,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 2,
        message: format!("cannot read {}: {e}", path.display()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(path, e))
}

fn load_diagram(path: &Path) -> Result<D, Failure> {
    Ok(parse_diagram(&read(path)?)?)
}

/// Accepts a plain graph document or any document with a `graph` field,
/// such as a realization or the corner fixture.
fn load_graph(path: &Path) -> Result<G, Failure> {
    let text = read(path)?;
    let nested = serde_json::from_str::<Value>(&text)
        .ok()
        .and_then(|v| v.get("graph").cloned());
    match nested {
        Some(inner) => parse_graph(&inner.to_string()).map_err(|e| match e {
            Error::Parse { pointer, message } => Failure {
                code: 2,
                message: format!("parse error at /graph{pointer}: {message}"),
            },
            e => e.into(),
        }),
        None => Ok(parse_graph(&text)?),
    }
}

struct Output {
    primary: String,
    /// Nonzero exit status after a successful write, e.g. a failed check.
    code: u8,
}

impl Output {
    fn ok(primary: String) -> Self {
        Output { primary, code: 0 }
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let depth = cli.depth;
    match &cli.cmd {
        Cmd::Validate(a) => {
            let text = read(&a.input)?;
            let d: D = match parse_diagram(&text) {
                Ok(d) => d,
                Err(Error::InvalidDiagram(report)) => {
                    return Ok(Output {
                        primary: to_pretty(&report),
                        code: 1,
                    })
                }
                Err(e) => return Err(e.into()),
            };
            Ok(Output::ok(to_pretty(&d.validate())))
        }
        Cmd::Telescope(a) => {
            let d = load_diagram(&a.input)?;
            let s = match &a.levels {
                Some(v) => Subsequence::explicit(v.clone())?,
                None => Subsequence::arithmetic(a.start, a.step)?,
            };
            let t = telescope(&d, &s)?;
            let out = if a.materialize {
                t.diagram.materialize(depth)?
            } else {
                t.diagram
            };
            Ok(Output::ok(to_pretty(&out)))
        }
        Cmd::Analyze(a) => {
            let d = load_diagram(&a.input)?;
            let unital = is_unital(&d, depth)?;
            let separated = recognize_separated(&d, depth)?;
            let mk = auto_ideal(&d, depth)?;
            let report = json!({
                "depth": depth,
                "unital": unital.status == UnitalStatus::UnitalWitnessed,
                "separated": separated.as_ref().map(ToJson::to_json),
                "mk_tail": mk.as_ref().map(|(_, t)| t.to_json()),
            });
            Ok(Output::ok(pretty(&report)))
        }
        Cmd::Separate(a) => {
            let d = load_diagram(&a.input)?;
            let (set, tail) = auto_ideal(&d, depth)?.ok_or_else(|| Failure {
                code: 3,
                message: format!("no ideal with a constant singleton complement through level {depth}"),
            })?;
            let s = separate(&d, &set, &tail.k, depth)?;
            Ok(Output::ok(to_pretty(&s)))
        }
        Cmd::Properify(a) => {
            let d = load_diagram(&a.input)?;
            let rep = recognize_separated(&d, depth)?.ok_or_else(|| Failure {
                code: 3,
                message: format!("no M_k-separated structure through level {depth}"),
            })?;
            let p = properify(&d, &rep.structure, depth)?;
            if let Some(path) = &a.trace {
                write_file(path, &to_pretty(&p.trace))?;
            }
            Ok(Output::ok(to_pretty(&p.diagram)))
        }
        Cmd::Realize(a) => {
            let d = load_diagram(&a.input)?;
            let g: RealizedGraph<BigUint> = match a.mode {
                Mode::Strict => realize_strict(&d, depth)?,
                Mode::Separated => {
                    let rep = recognize_separated(&d, depth)?.ok_or_else(|| Failure {
                        code: 3,
                        message: format!("no M_k-separated structure through level {depth}"),
                    })?;
                    realize_separated(&d, &rep.structure, depth)?
                }
                Mode::Auto => realize_auto(&d, depth)?.graph,
            };
            Ok(Output::ok(to_pretty(&g)))
        }
        Cmd::Verify(a) => {
            let g = parse_realized::<BigUint>(&read(&a.graph)?)?;
            let d = load_diagram(&a.diagram)?;
            let cert = verify_realization(&g, &d, depth)?;
            Ok(Output {
                code: if cert.pass { 0 } else { 1 },
                primary: to_pretty(&cert),
            })
        }
        Cmd::Decide(a) => {
            let d = load_diagram(&a.input)?;
            if a.realize {
                Ok(Output::ok(to_pretty(&realize_auto(&d, depth)?)))
            } else {
                Ok(Output::ok(to_pretty(&classify(&d, depth)?)))
            }
        }
        Cmd::K0(a) => {
            let g = load_graph(&a.graph)?;
            let x: K0Vector<BigInt> = parse_k0_vector(&a.vector).map_err(|e| match e {
                Error::Parse { pointer, message } => Failure {
                    code: 2,
                    message: format!("--vector {pointer}: {message}"),
                },
                e => e.into(),
            })?;
            let out = match a.op {
                K0Op::Member => {
                    let (member, cert) = monoid_contains(&g, &x)?;
                    json!({
                        "vector": x.to_json(),
                        "member": member,
                        "certificate": cert.to_json(),
                        "replayed": cert.replay(&g, &x)?,
                    })
                }
                K0Op::Normalize => unit_normalize(&g, &x)?.to_json(),
                K0Op::Corner => corner_graph(&g, &x)?.to_json(),
            };
            Ok(Output::ok(pretty(&out)))
        }
        Cmd::Gen(a) => {
            if let Some(name) = &a.fixture {
                let name: FixtureName = name.parse()?;
                let text = match fixture::<BigUint, BigInt>(name) {
                    Fixture::Diagram(d) => to_pretty(&d),
                    Fixture::Graph { graph, vector } => {
                        pretty(&json!({"graph": graph.to_json(), "vector": vector.to_json()}))
                    }
                };
                Ok(Output::ok(text))
            } else if a.random {
                let p = RandomParams {
                    levels: a.levels,
                    max_width: a.max_width,
                    max_mult: a.max_mult,
                    strict: a.strict,
                    separated: a.separated,
                };
                Ok(Output::ok(to_pretty(&random_diagram::<BigUint>(cli.seed, &p)?)))
            } else {
                Err(Failure {
                    code: 3,
                    message: "gen needs --fixture NAME or --random".into(),
                })
            }
        }
        Cmd::ExportDot(a) => match (&a.input, &a.graph) {
            (Some(p), _) => Ok(Output::ok(diagram_to_dot(&load_diagram(p)?, depth)?)),
            (None, Some(p)) => Ok(Output::ok(graph_to_dot(&load_graph(p)?))),
            (None, None) => unreachable!("clap requires one input"),
        },
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure {
        code: 2,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        match &cli.out {
            Some(path) => write_file(path, &out.primary)?,
            None => {
                let mut stdout = std::io::stdout().lock();
                let _ = stdout.write_all(out.primary.as_bytes());
            }
        }
        Ok(out.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let stderr = std::io::stderr();
            let color = stderr.is_terminal() && std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty());
            let prefix = if color { "\x1b[31merror\x1b[0m" } else { "error" };
            let _ = writeln!(stderr.lock(), "{prefix}: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
