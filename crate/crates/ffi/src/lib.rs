//! C ABI for the dyncore solver.
//!
//! Objects are opaque handles created by `dc_*_new`/`dc_*_parse`/`dc_solve`
//! and released with the matching `dc_*_free`. Fallible calls return a
//! [`DcStatus`]; on failure `dc_last_error_message` describes the error for
//! the calling thread until its next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dyncore::decomp::{heuristic_decomposition, parse_td, Strategy};
use dyncore::graph::{parse_gr, Graph};
use dyncore::model::{Element, RunOptions, Verdict};
use dyncore::oracle::{oracle_decide, OracleConfig};
use dyncore::{expr::preset, parse_problem, run_with, Error, ProblemExpr};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DcStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Syntax = 4,
    InvalidDecomposition = 5,
    Config = 6,
    Domain = 7,
    OracleRefused = 8,
    Witness = 9,
    Io = 10,
    OutOfRange = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DcElementKind {
    Vertex = 0,
    Edge = 1,
}

/// A simple undirected graph.
pub struct DcGraph(Graph);

/// A parsed problem expression.
pub struct DcProblem(ProblemExpr);

/// The outcome of one solver run.
pub struct DcVerdict {
    verdict: Verdict,
    witness: Vec<(Element, usize)>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: DcStatus, message: impl Into<String>) -> DcStatus {
    set_error(message.into());
    status
}

fn status_of(e: &Error) -> DcStatus {
    match e {
        Error::Parse { .. } => DcStatus::Parse,
        Error::Domain(_) => DcStatus::Domain,
        Error::InvalidDecomposition(_) => DcStatus::InvalidDecomposition,
        Error::Config(_) => DcStatus::Config,
        Error::Syntax { .. } => DcStatus::Syntax,
        Error::OracleRefused(_) => DcStatus::OracleRefused,
        Error::Witness(_) => DcStatus::Witness,
        Error::Io(_) => DcStatus::Io,
    }
}

fn from_error(e: Error) -> DcStatus {
    fail(status_of(&e), e.to_string())
}

/// Runs `f`, turning panics into `DcStatus::Panic`.
fn guard(f: impl FnOnce() -> Result<(), DcStatus>) -> DcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DcStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(DcStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, DcStatus> {
    if p.is_null() {
        return Err(fail(DcStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(DcStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, DcStatus> {
    p.as_ref().ok_or_else(|| fail(DcStatus::NullArgument, format!("{what} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, DcStatus> {
    p.as_mut().ok_or_else(|| fail(DcStatus::NullArgument, format!("{what} is null")))
}

/// Message for the last failing call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a graph on vertices `1..=n` from `edge_count` pairs stored
/// consecutively in `edges`.
///
/// # Safety
/// `edges` must point to `2 * edge_count` readable integers (or be null when
/// `edge_count` is 0); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_graph_new(n: u32, edges: *const u32, edge_count: usize, out: *mut *mut DcGraph) -> DcStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let pairs: &[u32] = if edge_count == 0 {
            &[]
        } else if edges.is_null() {
            return Err(fail(DcStatus::NullArgument, "edges is null"));
        } else {
            std::slice::from_raw_parts(edges, 2 * edge_count)
        };
        let g = Graph::with_vertices_1_to_n(n, pairs.chunks_exact(2).map(|p| (p[0], p[1]))).map_err(from_error)?;
        *out = Box::into_raw(Box::new(DcGraph(g)));
        Ok(())
    })
}

/// Parses a graph in PACE `.gr` format.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_graph_parse_gr(text: *const c_char, out: *mut *mut DcGraph) -> DcStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let g = parse_gr(read_str(text, "text")?).map_err(from_error)?;
        *out = Box::into_raw(Box::new(DcGraph(g)));
        Ok(())
    })
}

/// # Safety
/// `graph` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dc_graph_free(graph: *mut DcGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dc_graph_vertex_count(graph: *const DcGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.vertex_count())
}

/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dc_graph_edge_count(graph: *const DcGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Parses a problem expression such as `vertpart(tree,tree)`.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_problem_parse(text: *const c_char, out: *mut *mut DcProblem) -> DcStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let e = parse_problem(read_str(text, "text")?).map_err(from_error)?;
        *out = Box::into_raw(Box::new(DcProblem(e)));
        Ok(())
    })
}

/// Looks up a named problem: `3col`, `vc=<k>`, `two-trees`, `arb=<l>`.
///
/// # Safety
/// `name` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_problem_preset(name: *const c_char, out: *mut *mut DcProblem) -> DcStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let e = preset(read_str(name, "name")?).map_err(from_error)?;
        *out = Box::into_raw(Box::new(DcProblem(e)));
        Ok(())
    })
}

/// # Safety
/// `problem` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dc_problem_free(problem: *mut DcProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Decides `problem` on `graph`. `td_text` is an optional PACE `.td`
/// decomposition (null means min-fill). `threads` of 0 is treated as 1.
///
/// # Safety
/// `graph` and `problem` must be live handles; `td_text` null or a
/// nul-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_solve(
    graph: *const DcGraph,
    problem: *const DcProblem,
    td_text: *const c_char,
    threads: u32,
    want_witness: bool,
    out: *mut *mut DcVerdict,
) -> DcStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let g = &handle(graph, "graph")?.0;
        let expr = &handle(problem, "problem")?.0;
        let td = if td_text.is_null() {
            heuristic_decomposition(g, Strategy::MinFill)
        } else {
            parse_td(read_str(td_text, "td_text")?, g).map_err(from_error)?
        };
        let core = expr.to_core().map_err(from_error)?;
        let options = RunOptions {
            witness: want_witness,
            threads: threads.max(1) as usize,
        };
        let verdict = run_with(core.as_ref(), g, &td, &options).map_err(from_error)?;
        let witness = verdict
            .witness
            .as_ref()
            .and_then(|w| w.derived_partition.as_ref())
            .map(|m| m.iter().map(|(x, p)| (*x, *p)).collect())
            .unwrap_or_default();
        *out = Box::into_raw(Box::new(DcVerdict { verdict, witness }));
        Ok(())
    })
}

/// Brute-force answer for small graphs (at most 10 vertices, 14 edges).
///
/// # Safety
/// `graph` and `problem` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dc_oracle_decide(graph: *const DcGraph, problem: *const DcProblem, out: *mut bool) -> DcStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let g = &handle(graph, "graph")?.0;
        let expr = &handle(problem, "problem")?.0;
        *out = oracle_decide(expr, g, &OracleConfig::default()).map_err(from_error)?;
        Ok(())
    })
}

/// # Safety
/// `verdict` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dc_verdict_free(verdict: *mut DcVerdict) {
    if !verdict.is_null() {
        drop(Box::from_raw(verdict));
    }
}

/// # Safety
/// `verdict` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dc_verdict_answer(verdict: *const DcVerdict) -> bool {
    verdict.as_ref().is_some_and(|v| v.verdict.answer)
}

/// Number of decomposition nodes the solver ran on.
///
/// # Safety
/// `verdict` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dc_verdict_nodes(verdict: *const DcVerdict) -> usize {
    verdict.as_ref().map_or(0, |v| v.verdict.stats.nodes)
}

/// # Safety
/// `verdict` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dc_verdict_width(verdict: *const DcVerdict) -> usize {
    verdict.as_ref().map_or(0, |v| v.verdict.stats.width)
}

/// # Safety
/// `verdict` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dc_verdict_max_states(verdict: *const DcVerdict) -> usize {
    verdict.as_ref().map_or(0, |v| v.verdict.stats.max_states())
}

/// # Safety
/// `verdict` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dc_verdict_total_states(verdict: *const DcVerdict) -> usize {
    verdict.as_ref().map_or(0, |v| v.verdict.stats.total_states())
}

/// # Safety
/// `verdict` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dc_verdict_elapsed_ms(verdict: *const DcVerdict) -> f64 {
    verdict.as_ref().map_or(0.0, |v| v.verdict.stats.elapsed.as_secs_f64() * 1e3)
}

/// Number of witness entries: one per vertex (or edge) of a partition
/// problem answered YES with a witness requested, otherwise 0.
///
/// # Safety
/// `verdict` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dc_verdict_witness_len(verdict: *const DcVerdict) -> usize {
    verdict.as_ref().map_or(0, |v| v.witness.len())
}

/// Reads witness entry `index`. For a vertex, `u` is the vertex and `v` is
/// 0. Parts are numbered from 1 in argument order.
///
/// # Safety
/// `verdict` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn dc_verdict_witness_entry(
    verdict: *const DcVerdict,
    index: usize,
    kind: *mut DcElementKind,
    u: *mut u32,
    v: *mut u32,
    part: *mut usize,
) -> DcStatus {
    guard(|| {
        let verdict = handle(verdict, "verdict")?;
        let (kind, u, v, part) = (out_ptr(kind, "kind")?, out_ptr(u, "u")?, out_ptr(v, "v")?, out_ptr(part, "part")?);
        let Some((x, p)) = verdict.witness.get(index) else {
            return Err(fail(
                DcStatus::OutOfRange,
                format!("index {index} out of range (len {})", verdict.witness.len()),
            ));
        };
        match *x {
            Element::Vertex(a) => {
                *kind = DcElementKind::Vertex;
                *u = a;
                *v = 0;
            }
            Element::Edge(a, b) => {
                *kind = DcElementKind::Edge;
                *u = a;
                *v = b;
            }
        }
        *part = *p;
        Ok(())
    })
}
