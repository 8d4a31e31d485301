//! Command-line front end. [`run`] takes the arguments and output streams
//! explicitly and returns the process exit code.
//!
//! Exit codes: 0 yes, 1 no, 2 error, 3 disagreement with `--oracle`.

use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{ArgGroup, Parser};
use serde_json::{json, Value};

use crate::decomp::{heuristic_decomposition, parse_td, Strategy};
use crate::error::{Error, Result};
use crate::expr::{parse_problem, preset, ProblemExpr};
use crate::graph::{parse_gr, Graph};
use crate::model::{run_with, Element, PartitionMap, RunOptions, Verdict};
use crate::oracle::{oracle_decide, replay_partition, OracleConfig};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "dyncore", version, about = "Decide graph partition problems over a tree decomposition")]
#[command(group(ArgGroup::new("which").required(true).args(["problem", "preset"])))]
struct Args {
    /// Input graph in PACE .gr format.
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,

    /// Tree decomposition in PACE .td format; computed by a heuristic if absent.
    #[arg(long, value_name = "FILE")]
    td: Option<PathBuf>,

    /// Problem expression, e.g. "vertpart(tree,tree)".
    #[arg(long, value_name = "EXPR")]
    problem: Option<String>,

    /// Named problem: 3col, vc=<k>, two-trees, arb=<l>.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,

    /// Print the part of every vertex (or edge) on YES.
    #[arg(long)]
    witness: bool,

    /// Print one JSON object instead of plain text.
    #[arg(long)]
    json: bool,

    /// Cross-check the answer against brute force (small graphs only).
    #[arg(long)]
    oracle: bool,

    /// Print decomposition and state-table statistics.
    #[arg(long)]
    stats: bool,

    /// Write the normalized decomposition used by the solver.
    #[arg(long, value_name = "FILE")]
    emit_td: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, value_name = "N", default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    parallel: u16,

    /// Elimination heuristic when no --td is given: min-fill or min-degree.
    #[arg(long, value_name = "NAME", default_value = "min-fill")]
    heuristic: Strategy,

    /// Time the run and print one CSV row of statistics (with header).
    #[arg(long)]
    bench: bool,
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn witness_json(map: &PartitionMap) -> Value {
    let vertices: Vec<Value> = map
        .iter()
        .filter_map(|(x, p)| match x {
            Element::Vertex(v) => Some(json!([v, p])),
            Element::Edge(..) => None,
        })
        .collect();
    let edges: Vec<Value> = map
        .iter()
        .filter_map(|(x, p)| match x {
            Element::Edge(u, v) => Some(json!([u, v, p])),
            Element::Vertex(_) => None,
        })
        .collect();
    if edges.is_empty() && !vertices.is_empty() {
        json!({ "vertices": vertices })
    } else if vertices.is_empty() && !edges.is_empty() {
        json!({ "edges": edges })
    } else {
        json!({ "vertices": vertices, "edges": edges })
    }
}

fn witness_lines(map: &PartitionMap) -> String {
    let mut s = String::new();
    for (x, p) in map {
        match x {
            Element::Vertex(v) => s.push_str(&format!("v {v} {p}\n")),
            Element::Edge(u, v) => s.push_str(&format!("e {u} {v} {p}\n")),
        }
    }
    s
}

struct Outcome {
    text: String,
    code: i32,
    /// Printed to the error stream even on success.
    notes: Vec<String>,
}

fn solve(args: &Args) -> Result<Outcome> {
    let graph: Graph = parse_gr(&read(&args.graph)?)?;
    let expr: ProblemExpr = match (&args.problem, &args.preset) {
        (Some(text), _) => parse_problem(text)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => unreachable!("clap requires one of them"),
    };
    let core = expr.to_core()?;
    let td = match &args.td {
        Some(path) => parse_td(&read(path)?, &graph)?,
        None => heuristic_decomposition(&graph, args.heuristic),
    };
    let options = RunOptions {
        witness: args.witness || args.oracle,
        threads: args.parallel as usize,
    };
    let verdict: Verdict = run_with(core.as_ref(), &graph, &td, &options)?;
    if let Some(path) = &args.emit_td {
        std::fs::write(path, verdict.decomposition.to_td(graph.vertex_count()))?;
    }
    let partition = verdict.witness.as_ref().and_then(|w| w.derived_partition.as_ref());

    let mut notes = Vec::new();
    let mut code = if verdict.answer { EXIT_YES } else { EXIT_NO };
    if args.oracle {
        let cfg = OracleConfig::default();
        let expected = oracle_decide(&expr, &graph, &cfg)?;
        if expected != verdict.answer {
            notes.push(format!(
                "oracle mismatch: solver says {}, brute force says {}",
                yes_no(verdict.answer),
                yes_no(expected)
            ));
            code = EXIT_MISMATCH;
        } else if let Some(map) = partition {
            let replay = replay_partition(&expr, &graph, map, &cfg)?;
            if !replay.valid {
                notes.push("oracle mismatch: the witness partition does not replay".into());
                code = EXIT_MISMATCH;
            }
        }
        if code != EXIT_MISMATCH {
            notes.push("oracle agrees".into());
        }
    }
    if args.witness && verdict.answer && partition.is_none() {
        notes.push(format!("{expr} is not a partition problem; no witness to print"));
    }

    let stats = &verdict.stats;
    let text = if args.bench {
        format!(
            "graph,problem,vertices,edges,nodes,width,max_states,total_states,elapsed_ms,answer\n\
             {},{},{},{},{},{},{},{},{:.3},{}\n",
            args.graph.display(),
            csv_field(&expr.to_string()),
            graph.vertex_count(),
            graph.edge_count(),
            stats.nodes,
            stats.width,
            stats.max_states(),
            stats.total_states(),
            ms(stats.elapsed),
            yes_no(verdict.answer)
        )
    } else if args.json {
        let mut obj = serde_json::Map::new();
        obj.insert("answer".into(), json!(yes_no(verdict.answer)));
        if args.witness {
            if let Some(map) = partition {
                obj.insert("witness".into(), witness_json(map));
            }
        }
        if args.stats {
            obj.insert(
                "stats".into(),
                json!({
                    "nodes": stats.nodes,
                    "width": stats.width,
                    "max_states": stats.max_states(),
                    "total_states": stats.total_states(),
                    "elapsed_ms": ms(stats.elapsed),
                }),
            );
        }
        format!("{}\n", Value::Object(obj))
    } else {
        let mut s = format!("{}\n", if verdict.answer { "YES" } else { "NO" });
        if args.witness {
            if let Some(map) = partition {
                s.push_str(&witness_lines(map));
            }
        }
        if args.stats {
            s.push_str(&format!(
                "c nodes {}\nc width {}\nc max_states {}\nc total_states {}\nc elapsed_ms {:.3}\n",
                stats.nodes,
                stats.width,
                stats.max_states(),
                stats.total_states(),
                ms(stats.elapsed)
            ));
        }
        s
    };
    Ok(Outcome { text, code, notes })
}

fn csv_field(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Parses `args` (including the program name) and runs one invocation.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{shown}");
                    EXIT_YES
                }
                _ => {
                    let _ = write!(err, "{shown}");
                    EXIT_ERROR
                }
            };
        }
    };
    match solve(&args) {
        Ok(outcome) => {
            let _ = out.write_all(outcome.text.as_bytes());
            for n in &outcome.notes {
                let _ = writeln!(err, "{n}");
            }
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}
