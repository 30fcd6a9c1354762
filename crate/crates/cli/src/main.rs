//! `hyperpath` command-line tool.
//!
//! Exit status: 0 success, 1 usage or parse error, 2 target unreachable,
//! 3 internal invariant violation.

mod report;

use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hyperpath::grammar::{from_pruned, parse_grammar, to_hypergraph, write_grammar, GrammarError};
use hyperpath::inside::ExtractError;
use hyperpath::oracle::fixpoint_costs;
use hyperpath::text::parse_cost;
use hyperpath::{
    extract_best_tree, format_cost, prune, reach_from, reach_to, reduce, viterbi_inside, viterbi_outside, ArcId,
    Document, Hypergraph, Query, Reduction, VertexId,
};
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("target unreachable")]
    Unreachable,
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Unreachable => 2,
            CliError::Internal(_) => 3,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "hyperpath", version, about = "Shortest hyperpath-trees, inside/outside costs and beam pruning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// List the vertices reachable from the file's sources.
    ReachFrom { file: PathBuf },
    /// List the vertices with a head-to-tail path to the target. Only
    /// meaningful on graphs whose vertices are all reachable; see `reduce`.
    ReachTo { file: PathBuf },
    /// Keep exactly the vertices and arcs on some tree from the sources to
    /// the target, and print that hypergraph.
    Reduce { file: PathBuf },
    /// Print `vertex inside pi-arc` for every vertex.
    Inside {
        file: PathBuf,
        /// Print value-iteration costs from the brute-force reference instead.
        #[arg(long, hide = true)]
        oracle: bool,
    },
    /// Print a cheapest tree as an s-expression of arc indices, then its cost.
    BestTree {
        file: PathBuf,
        /// Root vertex; defaults to the target.
        #[arg(long)]
        vertex: Option<String>,
    },
    /// Print `vertex outside psi-arc` for every vertex.
    Outside { file: PathBuf },
    /// Reduce, then drop every vertex and arc whose best tree costs more than
    /// the best cost plus the beam, and print the pruned hypergraph.
    Prune {
        file: PathBuf,
        /// Beam width: a nonnegative number or `inf`.
        #[arg(long, value_parser = parse_beam, allow_hyphen_values = true)]
        beam: f64,
        #[arg(long, value_enum, default_value = "text")]
        report: ReportFormat,
        /// Write the report here instead of standard error.
        #[arg(long)]
        report_file: Option<PathBuf>,
    },
    /// Convert a grammar to a hypergraph; writes `<arc> <production>` pairs
    /// to the map file.
    FromGrammar {
        file: PathBuf,
        /// Map file path; defaults to `<file>.map` (`grammar.map` for stdin).
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Convert, reduce, prune with the beam and print the surviving grammar.
    PruneGrammar {
        file: PathBuf,
        #[arg(long, value_parser = parse_beam, allow_hyphen_values = true)]
        beam: f64,
    },
    /// Parse and check a file; prints nothing on success.
    Validate {
        file: PathBuf,
        /// Treat the input as a grammar.
        #[arg(long)]
        grammar: bool,
    },
}

fn parse_beam(s: &str) -> std::result::Result<f64, String> {
    match parse_cost(s) {
        Some(b) if b >= 0.0 => Ok(b),
        _ => Err(format!("`{s}` is not a nonnegative number or `inf`")),
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| usage(format!("standard input: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
    }
}

fn load(path: &Path) -> Result<Document> {
    let text = read_input(path)?;
    Document::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_query(path: &Path) -> Result<(Document, Query)> {
    let doc = load(path)?;
    let q = doc.query().map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok((doc, q))
}

fn names(g: &Hypergraph, vs: impl Iterator<Item = VertexId>) -> String {
    vs.map(|v| g.display_name(v) + "\n").collect()
}

fn cost_table(g: &Hypergraph, costs: &[f64], arcs: &[Option<ArcId>]) -> String {
    let mut out = String::new();
    for v in g.vertices() {
        let arc = ArcId::or_zero(arcs[v.index()]);
        writeln!(out, "{} {} {}", g.display_name(v), format_cost(costs[v.index()]), arc).unwrap();
    }
    out
}

fn reduced(g: &Hypergraph, q: &Query) -> Result<(Reduction, Query)> {
    let red = reduce(g, q);
    let rq = red.query.clone().ok_or(CliError::Unreachable)?;
    Ok((red, rq))
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

fn grammar_error(path: &Path, e: GrammarError) -> CliError {
    match e {
        GrammarError::LanguageEmpty(_) => CliError::Unreachable,
        e => usage(format!("{}: {e}", path.display())),
    }
}

/// Standard output text, plus an optional report for standard error.
struct Output {
    stdout: String,
    stderr: Option<String>,
    /// Error to report after the output has been written.
    then: Option<CliError>,
}

impl From<String> for Output {
    fn from(stdout: String) -> Output {
        Output {
            stdout,
            stderr: None,
            then: None,
        }
    }
}

fn run(command: Command) -> Result<Output> {
    match command {
        Command::ReachFrom { file } => {
            let doc = load(&file)?;
            if doc.sources.is_empty() {
                return Err(usage(format!("{}: no `source` line", file.display())));
            }
            let sources: Vec<VertexId> = doc.sources.iter().map(|s| s.0).collect();
            Ok(names(&doc.graph, reach_from(&doc.graph, &sources).vertices()).into())
        }
        Command::ReachTo { file } => {
            let doc = load(&file)?;
            let target = doc
                .target
                .ok_or_else(|| usage(format!("{}: no `target` line", file.display())))?;
            Ok(names(&doc.graph, reach_to(&doc.graph, target).vertices()).into())
        }
        Command::Reduce { file } => {
            let (doc, q) = load_query(&file)?;
            let (red, rq) = reduced(&doc.graph, &q)?;
            Ok(Document::new(red.subgraph.graph, Some(&rq)).write().into())
        }
        Command::Inside { file, oracle } => {
            let doc = load(&file)?;
            let q = doc.query().ok();
            if oracle {
                let costs = fixpoint_costs(&doc.graph, &doc.sources);
                return Ok(cost_table(&doc.graph, &costs, &vec![None; costs.len()]).into());
            }
            let res = viterbi_inside(&doc.graph, &doc.sources).map_err(|e| usage(format!("{}: {e}", file.display())))?;
            let mut out: Output = cost_table(&doc.graph, &res.inside, &res.pi).into();
            if let Some(q) = q {
                if res.cost(q.target()).is_infinite() {
                    out.then = Some(CliError::Unreachable);
                }
            }
            Ok(out)
        }
        Command::BestTree { file, vertex } => {
            let doc = load(&file)?;
            let v = match &vertex {
                Some(name) => doc
                    .graph
                    .vertex_by_name(name)
                    .ok_or_else(|| usage(format!("no vertex named `{name}`")))?,
                None => doc
                    .target
                    .ok_or_else(|| usage(format!("{}: no `target` line and no --vertex", file.display())))?,
            };
            let res = viterbi_inside(&doc.graph, &doc.sources).map_err(|e| usage(format!("{}: {e}", file.display())))?;
            let tree = extract_best_tree(&doc.graph, &res, v).map_err(|e| match e {
                ExtractError::Unreachable(_) => CliError::Unreachable,
                e => internal(e),
            })?;
            let cost = tree.cost(&doc.graph, &doc.sources);
            Ok(format!("{}\n{}\n", tree.to_sexpr(&doc.graph), format_cost(cost)).into())
        }
        Command::Outside { file } => {
            let (doc, q) = load_query(&file)?;
            let inside = viterbi_inside(&doc.graph, q.sources()).map_err(internal)?;
            if inside.cost(q.target()).is_infinite() {
                return Err(CliError::Unreachable);
            }
            let out = viterbi_outside(&doc.graph, &inside, q.target()).map_err(internal)?;
            Ok(cost_table(&doc.graph, &out.outside, &out.psi).into())
        }
        Command::Prune {
            file,
            beam,
            report,
            report_file,
        } => {
            let (doc, q) = load_query(&file)?;
            let (red, rq) = reduced(&doc.graph, &q)?;
            let g = red.graph();
            let inside = viterbi_inside(g, rq.sources()).map_err(internal)?;
            let outside = viterbi_outside(g, &inside, rq.target()).map_err(internal)?;
            let p = prune(g, &inside, &outside, beam).map_err(internal)?;
            let kept = red.subgraph.compose(p.subgraph.clone());
            let kq = kept
                .map_query(&q)
                .ok_or_else(|| internal("pruning removed the target"))?;
            let tables = report::Tables::new(&red.subgraph, &inside, &outside, &p);
            let text = match report {
                ReportFormat::Text => tables.text(),
                ReportFormat::Json => tables.json().map_err(internal)?,
            };
            let stderr = match report_file {
                Some(path) => {
                    std::fs::write(&path, text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                    None
                }
                None => Some(text),
            };
            Ok(Output {
                stdout: Document::new(kept.graph, Some(&kq)).write(),
                stderr,
                then: None,
            })
        }
        Command::FromGrammar { file, map } => {
            let g = parse_grammar(&read_input(&file)?).map_err(|e| grammar_error(&file, e))?;
            let conv = to_hypergraph(&g).map_err(|e| grammar_error(&file, e))?;
            let map_path = map.unwrap_or_else(|| {
                if file == Path::new("-") {
                    PathBuf::from("grammar.map")
                } else {
                    let mut p = file.clone().into_os_string();
                    p.push(".map");
                    PathBuf::from(p)
                }
            });
            let mut pairs = String::new();
            for a in conv.graph.arc_ids() {
                writeln!(pairs, "{} {}", a.get(), conv.map.production(a).get()).unwrap();
            }
            std::fs::write(&map_path, pairs).map_err(|e| usage(format!("{}: {e}", map_path.display())))?;
            Ok(Document::new(conv.graph, Some(&conv.query)).write().into())
        }
        Command::PruneGrammar { file, beam } => {
            let g = parse_grammar(&read_input(&file)?).map_err(|e| grammar_error(&file, e))?;
            let conv = to_hypergraph(&g).map_err(|e| grammar_error(&file, e))?;
            let (red, rq) = reduced(&conv.graph, &conv.query)?;
            let inside = viterbi_inside(red.graph(), rq.sources()).map_err(internal)?;
            let outside = viterbi_outside(red.graph(), &inside, rq.target()).map_err(internal)?;
            let p = prune(red.graph(), &inside, &outside, beam).map_err(internal)?;
            let kept = red.subgraph.compose(p.subgraph);
            let pruned = from_pruned(&g, &conv.map, &kept).map_err(|e| grammar_error(&file, e))?;
            Ok(write_grammar(&pruned.grammar).into())
        }
        Command::Validate { file, grammar } => {
            if grammar {
                let g = parse_grammar(&read_input(&file)?).map_err(|e| grammar_error(&file, e))?;
                to_hypergraph(&g).map_err(|e| grammar_error(&file, e))?;
            } else {
                let doc = load(&file)?;
                doc.graph.validate().map_err(internal)?;
                if doc.target.is_some() || !doc.sources.is_empty() {
                    doc.query().map_err(|e| usage(format!("{}: {e}", file.display())))?;
                }
            }
            Ok(String::new().into())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let finish = |e: CliError| {
        eprintln!("hyperpath: {e}");
        ExitCode::from(e.code())
    };
    match run(cli.command) {
        Ok(out) => {
            if let Some(report) = out.stderr {
                eprint!("{report}");
            }
            let mut stdout = io::stdout().lock();
            if let Err(e) = stdout.write_all(out.stdout.as_bytes()).and_then(|_| stdout.flush()) {
                if e.kind() != io::ErrorKind::BrokenPipe {
                    return finish(usage(format!("standard output: {e}")));
                }
            }
            match out.then {
                Some(e) => finish(e),
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => finish(e),
    }
}
