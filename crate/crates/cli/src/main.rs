//! Command-line front end: grids, moves, plan replay, compilation,
//! certificate checks, pattern simulation and pivot-minor queries.
//!
//! Exit status: 0 success, 1 verification failure, 2 usage error,
//! 3 malformed input, 4 size limit.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use pivotgrid::canon::CANON_MAX_N;
use pivotgrid::compiler::{compile_graph, verify, CompileError, GridCompilation, SizeReport};
use pivotgrid::mbqc::{simulate_pattern, Pattern};
use pivotgrid::oracle::{StateVector, ORACLE_MAX_QUBITS};
use pivotgrid::search::{is_pivot_minor, orbit_with, MinorAnswer, MinorMode, SearchError, SearchOptions, Witness};
use pivotgrid::selftest::{distinctness_sweep, exhaustive_rule_sweep, orthonormality_sweep, random_rule_sweep, SweepReport};
use pivotgrid::{generate, replay_plan, Graph, GridKind, OutcomeMode, PairingStrategy, SignedGraphState, VertexSet};
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Parser, Debug)]
#[command(name = "pivotgrid", version, about = "Signed graph states, pivot minors and grid compilation")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// zero, random or forced:<bits>.
    #[arg(long, global = true, default_value = "zero")]
    outcomes: OutcomeMode,
    /// Largest vertex count for sweeps.
    #[arg(long, global = true, default_value_t = 4)]
    max_n: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Path,
    Rect,
    Hex,
    Tri,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Strategy {
    Lowest,
    Highest,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Labeled,
    Iso,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a path or grid as an edge list.
    Gen {
        #[arg(value_enum)]
        kind: Kind,
        rows: usize,
        cols: usize,
    },
    /// Local complementation; on a signed state the sign follows the LC rule.
    Lc { input: PathBuf, vertex: usize },
    /// Pivot on an edge; on a signed state the sign follows the Hadamard-pair rule.
    Pivot { input: PathBuf, u: usize, v: usize },
    /// Replay an X/Z measurement plan on a signed state.
    Measure {
        state: PathBuf,
        /// Comma-separated X-measured vertices.
        #[arg(long, value_delimiter = ',')]
        x: Vec<usize>,
        /// Comma-separated Z-measured vertices.
        #[arg(long, value_delimiter = ',')]
        z: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Strategy::Lowest)]
        strategy: Strategy,
    },
    /// Compile a graph into a triangular-grid measurement plan.
    Compile { graph: PathBuf },
    /// Check a compilation against a graph.
    Verify { compilation: PathBuf, graph: PathBuf },
    /// Run a pattern on an input state (|+> on every input by default).
    Simulate {
        pattern: PathBuf,
        /// JSON {"amplitudes": [[re, im], ...]} over the inputs in order.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Pivot orbit of a graph.
    Orbit {
        graph: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        max_size: usize,
        #[arg(long, value_enum, default_value_t = Mode::Iso)]
        mode: Mode,
    },
    /// Is G a pivot minor of H?
    Minor {
        g: PathBuf,
        h: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Iso)]
        mode: Mode,
        #[arg(long, default_value_t = 100_000)]
        max_size: usize,
        /// Only pivot sequences using each vertex at most once.
        #[arg(long)]
        vertex_once: bool,
    },
    /// Compare the rewrite rules with the dense oracle.
    Selftest {
        /// Extra random instances on up to 8 vertices.
        #[arg(long, default_value_t = 0)]
        random: usize,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("malformed input: {0}")]
    Input(String),
    #[error("size limit: {0}")]
    Size(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Input(_) | CliError::Io(_) => 3,
            CliError::Size(_) => 4,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn read_input(path: &Path) -> CliResult<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Edge-list text or `{vertices, edges}` JSON.
fn parse_graph(text: &str) -> CliResult<Graph> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(input_err)
    } else {
        Graph::parse_edge_list(text).map_err(input_err)
    }
}

fn read_graph(path: &Path) -> CliResult<Graph> {
    parse_graph(&read_input(path)?)
}

/// A graph, or a signed state when the text ends with an `S:` line.
enum Loaded {
    Graph(Graph),
    State(SignedGraphState),
}

fn read_graph_or_state(path: &Path) -> CliResult<Loaded> {
    let text = read_input(path)?;
    let last = text.trim_end().lines().last().unwrap_or("");
    if last.trim_start().starts_with("S:") {
        SignedGraphState::parse_text(&text).map(Loaded::State).map_err(input_err)
    } else {
        parse_graph(&text).map(Loaded::Graph)
    }
}

fn read_state(path: &Path) -> CliResult<SignedGraphState> {
    match read_graph_or_state(path)? {
        Loaded::State(s) => Ok(s),
        Loaded::Graph(g) => Ok(SignedGraphState::unsigned(g)),
    }
}

fn graph_value(g: &Graph) -> Value {
    serde_json::to_value(g).expect("graphs serialise")
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialise") + "\n"
}

fn run(cli: &Cli) -> CliResult<(String, u8)> {
    let json = cli.format == Format::Json;
    let out = match &cli.command {
        Command::Gen { kind, rows, cols } => {
            let kind = match kind {
                Kind::Path => GridKind::Path,
                Kind::Rect => GridKind::Rectangular,
                Kind::Hex => GridKind::Hexagonal,
                Kind::Tri => GridKind::Triangular,
            };
            let g = generate(kind, *rows, *cols).map_err(|e| CliError::Usage(e.to_string()))?;
            if json {
                pretty(&graph_value(&g))
            } else {
                g.to_edge_list()
            }
        }
        Command::Lc { input, vertex } => match read_graph_or_state(input)? {
            Loaded::Graph(g) => {
                let h = g.local_complement(*vertex).map_err(|e| CliError::Usage(e.to_string()))?;
                if json {
                    pretty(&graph_value(&h))
                } else {
                    h.to_edge_list()
                }
            }
            Loaded::State(s) => state_out(&s.apply_lc_op(*vertex).map_err(|e| CliError::Usage(e.to_string()))?, json),
        },
        Command::Pivot { input, u, v } => match read_graph_or_state(input)? {
            Loaded::Graph(g) => {
                let h = g.pivot(*u, *v).map_err(|e| CliError::Usage(e.to_string()))?;
                if json {
                    pretty(&graph_value(&h))
                } else {
                    h.to_edge_list()
                }
            }
            Loaded::State(s) => {
                state_out(&s.apply_hadamard_pair(*u, *v).map_err(|e| CliError::Usage(e.to_string()))?, json)
            }
        },
        Command::Measure { state, x, z, strategy } => {
            let st = read_state(state)?;
            let n = st.vertex_count();
            if let Some(bad) = x.iter().chain(z).find(|&&u| u >= n) {
                return Err(CliError::Usage(format!("vertex {bad} is not in the state")));
            }
            let strategy = match strategy {
                Strategy::Lowest => PairingStrategy::LowestEdge,
                Strategy::Highest => PairingStrategy::HighestEdge,
            };
            let replay = replay_plan(
                &st,
                &VertexSet::from_iter(n, x.iter().copied()),
                &VertexSet::from_iter(n, z.iter().copied()),
                &mut cli.outcomes.source(cli.seed),
                strategy,
            )
            .map_err(|e| CliError::Usage(e.to_string()))?;
            if json {
                pretty(&json!({
                    "graph": graph_value(replay.state.graph()),
                    "sign": replay.state.sign().to_vec(),
                    "survivors": replay.survivors,
                    "schedule": replay.schedule,
                }))
            } else {
                let mut s = replay.state.to_text();
                s.push_str(&format!("survivors: {:?}\n", replay.survivors));
                for step in &replay.schedule {
                    s.push_str(&format!("{:?} {:?} {:?}\n", step.op, step.vertices, step.outcomes));
                }
                s
            }
        }
        Command::Compile { graph } => {
            let g = read_graph(graph)?;
            let comp = compile_graph(&g).map_err(|e| match e {
                CompileError::Mismatch(m) => CliError::Verification(m),
                other => CliError::Input(other.to_string()),
            })?;
            // The compilation is JSON in either format.
            serde_json::to_string(&comp).expect("compilations serialise") + "\n"
        }
        Command::Verify { compilation, graph } => {
            let comp: GridCompilation = serde_json::from_str(&read_input(compilation)?).map_err(input_err)?;
            let g = read_graph(graph)?;
            let v = verify(&comp, &g, &mut cli.outcomes.source(cli.seed)).map_err(|e| match e {
                CompileError::Malformed(m) => CliError::Input(m),
                other => CliError::Verification(other.to_string()),
            })?;
            let size = SizeReport::of(&comp);
            let witness = Witness::from_compilation(&comp);
            if json {
                pretty(&json!({
                    "verified": true,
                    "sign": v.sign.to_vec(),
                    "size": size,
                    "witness": { "pivots": witness.pivots.len(), "deletions": witness.deletions.len() },
                }))
            } else {
                format!(
                    "verified: grid {}x{} (n={}, d={}), {} pivots, {} deletions, sign {:?}\n",
                    size.rows,
                    size.cols,
                    size.n,
                    size.depth,
                    witness.pivots.len(),
                    witness.deletions.len(),
                    v.sign.to_vec()
                )
            }
        }
        Command::Simulate { pattern, input } => simulate(cli, pattern, input.as_deref())?,
        Command::Orbit { graph, max_size, mode } => {
            let g = read_graph(graph)?;
            let opts = SearchOptions { mode: minor_mode(*mode), max_size: *max_size, vertex_once: false };
            let orbit = orbit_with(&g, &opts).map_err(search_err)?;
            if json {
                let members: Vec<Value> = orbit
                    .members
                    .iter()
                    .map(|m| json!({ "digest": m.digest.to_string(), "pivots": m.pivots, "graph": graph_value(&m.graph) }))
                    .collect();
                pretty(&json!({ "size": orbit.len(), "classes": orbit.by_digest.len(), "truncated": orbit.truncated, "members": members }))
            } else {
                let mut s = format!(
                    "orbit size {} ({} isomorphism classes){}\n",
                    orbit.len(),
                    orbit.by_digest.len(),
                    if orbit.truncated { ", truncated" } else { "" }
                );
                for m in &orbit.members {
                    s.push_str(&format!("{} {:?}\n", m.digest, m.pivots));
                }
                s
            }
        }
        Command::Minor { g, h, mode, max_size, vertex_once } => {
            let (g, h) = (read_graph(g)?, read_graph(h)?);
            let opts = SearchOptions { mode: minor_mode(*mode), max_size: *max_size, vertex_once: *vertex_once };
            let ans = is_pivot_minor(&g, &h, &opts).map_err(search_err)?;
            match (ans, json) {
                (MinorAnswer::Yes(w), true) => pretty(&json!({ "answer": "yes", "witness": w })),
                (MinorAnswer::Yes(w), false) => {
                    format!("pivot minor: yes\n{}\n", serde_json::to_string(&w).expect("witnesses serialise"))
                }
                (MinorAnswer::No, true) => pretty(&json!({ "answer": "no" })),
                (MinorAnswer::No, false) => "not a pivot minor\n".to_string(),
                (MinorAnswer::Unknown, true) => pretty(&json!({ "answer": "unknown" })),
                (MinorAnswer::Unknown, false) => format!("unknown: orbit truncated at {max_size} members\n"),
            }
        }
        Command::Selftest { random } => {
            if cli.max_n > 5 {
                return Err(CliError::Size(format!("--max-n {} exceeds the exhaustive limit 5", cli.max_n)));
            }
            let mut rep = SweepReport::default();
            rep.merge(exhaustive_rule_sweep(cli.max_n));
            rep.merge(orthonormality_sweep(cli.max_n));
            rep.merge(distinctness_sweep(cli.max_n.min(3)));
            rep.merge(random_rule_sweep(*random, 8, cli.seed));
            let text = if json {
                pretty(&json!({ "checks": rep.checks, "failures": rep.failures, "messages": rep.messages }))
            } else {
                let mut s = format!("{} checks, {} failures\n", rep.checks, rep.failures);
                for m in &rep.messages {
                    s.push_str(m);
                    s.push('\n');
                }
                s
            };
            return Ok((text, if rep.passed() { 0 } else { 1 }));
        }
    };
    Ok((out, 0))
}

fn minor_mode(m: Mode) -> MinorMode {
    match m {
        Mode::Labeled => MinorMode::Labeled,
        Mode::Iso => MinorMode::UpToIso,
    }
}

fn search_err(e: SearchError) -> CliError {
    match e {
        SearchError::TooLarge(n) => CliError::Size(format!("{n} vertices, search is limited to {CANON_MAX_N}")),
        SearchError::Canon(c) => CliError::Size(c.to_string()),
        other => CliError::Input(other.to_string()),
    }
}

fn state_out(s: &SignedGraphState, json: bool) -> String {
    if json {
        pretty(&json!({ "graph": graph_value(s.graph()), "sign": s.sign().to_vec() }))
    } else {
        s.to_text()
    }
}

#[derive(Deserialize)]
struct InputState {
    amplitudes: Vec<(f64, f64)>,
}

fn simulate(cli: &Cli, pattern: &Path, input: Option<&Path>) -> CliResult<String> {
    let p: Pattern = serde_json::from_str(&read_input(pattern)?).map_err(input_err)?;
    let n = p.open.graph.vertex_count();
    if n > ORACLE_MAX_QUBITS {
        return Err(CliError::Size(format!("pattern has {n} vertices, the simulator holds {ORACLE_MAX_QUBITS}")));
    }
    p.validate().map_err(input_err)?;
    let inputs = p.open.inputs.clone();
    let psi = match input {
        None => StateVector::plus(inputs).map_err(input_err)?,
        Some(path) => {
            let st: InputState = serde_json::from_str(&read_input(path)?).map_err(input_err)?;
            let amps = st.amplitudes.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
            let mut psi = StateVector::from_amplitudes(inputs, amps).map_err(input_err)?;
            if psi.norm() < 1e-12 {
                return Err(CliError::Input("input state has zero norm".into()));
            }
            psi.normalize();
            psi
        }
    };
    let sim = simulate_pattern(&p, &psi, &mut cli.outcomes.source(cli.seed)).map_err(input_err)?;
    let amps: Vec<(f64, f64)> = sim.output.amplitudes().iter().map(|a| (a.re, a.im)).collect();
    let v = json!({
        "outputs": p.open.outputs,
        "transcript": sim.transcript,
        "frame": sim.frame,
        "output_amplitudes": amps,
    });
    Ok(if cli.format == Format::Json {
        pretty(&v)
    } else {
        let mut s = String::new();
        for t in &sim.transcript {
            s.push_str(&format!(
                "measure {} at {:.6} (planned {:.6}) -> {} (planned {}) p={:.6}\n",
                t.vertex, t.adapted_angle, t.planned_angle, t.outcome, t.planned_outcome, t.probability
            ));
        }
        s.push_str(&format!("outputs {:?}\n", p.open.outputs));
        for (i, (re, im)) in amps.iter().enumerate() {
            s.push_str(&format!("{i:0width$b} {re:+.9} {im:+.9}\n", width = p.open.outputs.len().max(1)));
        }
        s
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok((text, code)) => {
            let written = match &cli.output {
                Some(path) => fs::write(path, &text),
                None => io::stdout().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: i/o: {e}");
                return ExitCode::from(3);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
