//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::time::{Duration, Instant};

use common::{all_graphs, graph, random_graph};
use dyncore::decomp::{heuristic_decomposition, Strategy};
use dyncore::graph::Graph;
use dyncore::model::check_witness;
use dyncore::oracle::{oracle_decide, oracle_recognize, replay_partition, OracleConfig};
use dyncore::state::State;
use dyncore::{parse_problem, run, ProblemExpr, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORACLE: OracleConfig = OracleConfig {
    max_vertices: 10,
    max_edges: 15,
};

/// Running tally of witness checks, reported as its own criterion.
#[derive(Default)]
struct WitnessLog {
    checked: usize,
    failures: Vec<String>,
}

impl WitnessLog {
    fn record(&mut self, expr: &ProblemExpr, g: &Graph, verdict: &Verdict) {
        if !verdict.answer {
            return;
        }
        self.checked += 1;
        let core = expr.to_core().unwrap();
        let Some(w) = &verdict.witness else {
            self.failures.push(format!("{expr}: YES without witness"));
            return;
        };
        if !check_witness(core.as_ref(), g, &verdict.decomposition, w).unwrap() {
            self.failures.push(format!("{expr} on {g:?}: witness fails the relations"));
        }
        if !matches!(expr, ProblemExpr::VertPart(_) | ProblemExpr::EdgePart(_) | ProblemExpr::GraphPart(..)) {
            return;
        }
        let Some(map) = &w.derived_partition else {
            self.failures.push(format!("{expr}: no partition extracted"));
            return;
        };
        let replay = replay_partition(expr, g, map, &ORACLE).unwrap();
        if !replay.valid {
            self.failures.push(format!("{expr} on {g:?}: partition does not replay"));
        }
        if let ProblemExpr::GraphPart(p, _) = expr {
            let root = verdict.decomposition.root();
            let reported = match w.assignment[&root].as_tuple().and_then(|t| t.last()) {
                Some(State::Count(q)) => *q as usize,
                _ => usize::MAX,
            };
            if reported != replay.transversal || reported > *p as usize {
                self.failures.push(format!(
                    "{expr} on {g:?}: reported q={reported}, replayed {}",
                    replay.transversal
                ));
            }
        }
    }
}

fn solve(expr: &ProblemExpr, g: &Graph) -> Verdict {
    let core = expr.to_core().unwrap();
    let td = heuristic_decomposition(g, Strategy::MinFill);
    run(core.as_ref(), g, &td, true).unwrap()
}

fn battery() -> Vec<ProblemExpr> {
    let mut texts = vec![
        "vertpart(edgeless,edgeless)".to_string(),
        "vertpart(edgeless,edgeless,edgeless)".to_string(),
        "vertpart(tree,tree)".to_string(),
        "edgepart(forest,forest)".to_string(),
    ];
    texts.extend((0..=4).map(|k| format!("vertpart(atmost({k}),edgeless)")));
    texts.extend((0..=4).map(|p| format!("graphpart({p};edgeless,edgeless)")));
    texts.iter().map(|t| parse_problem(t).unwrap()).collect()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn compare_with_oracle(graphs: &[Graph], log: &mut WitnessLog) -> Outcome {
    let mut checks = 0;
    let mut mismatches = Vec::new();
    for expr in battery() {
        for g in graphs {
            let verdict = solve(&expr, g);
            let expected = oracle_decide(&expr, g, &ORACLE).unwrap();
            checks += 1;
            if verdict.answer != expected {
                mismatches.push(format!("{expr} on {g:?}"));
            }
            log.record(&expr, g, &verdict);
        }
    }
    Outcome {
        pass: mismatches.is_empty(),
        detail: format!(
            "{checks} checks, {} mismatches{}",
            mismatches.len(),
            first(&mismatches)
        ),
    }
}

fn first(items: &[String]) -> String {
    items.first().map(|s| format!("; first: {s}")).unwrap_or_default()
}

fn exhaustive_small(log: &mut WitnessLog) -> Outcome {
    let graphs: Vec<Graph> = (0..=4).flat_map(all_graphs).collect();
    compare_with_oracle(&graphs, log)
}

fn randomized(log: &mut WitnessLog) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut graphs = Vec::new();
    for n in [5, 6] {
        for p in [0.2, 0.5, 0.8] {
            graphs.extend((0..100).map(|_| random_graph(&mut rng, n, p)));
        }
    }
    compare_with_oracle(&graphs, log)
}

fn base_cores(log: &mut WitnessLog) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut graphs: Vec<Graph> = (0..=4).flat_map(all_graphs).collect();
    for n in 1..=8 {
        for _ in 0..500 {
            let p = rng.gen_range(0.05..0.6);
            graphs.push(random_graph(&mut rng, n, p));
        }
    }
    let mut exprs: Vec<ProblemExpr> = ["forest", "tree", "edgeless"]
        .iter()
        .map(|t| parse_problem(t).unwrap())
        .collect();
    exprs.extend((0..=8).map(ProblemExpr::AtMost));
    let mut checks = 0;
    let mut mismatches = Vec::new();
    for g in &graphs {
        for expr in &exprs {
            let verdict = solve(expr, g);
            checks += 1;
            if verdict.answer != oracle_recognize(expr, g).unwrap() {
                mismatches.push(format!("{expr} on {g:?}"));
            }
            log.record(expr, g, &verdict);
        }
    }
    Outcome {
        pass: mismatches.is_empty(),
        detail: format!("{checks} checks, {} mismatches{}", mismatches.len(), first(&mismatches)),
    }
}

fn coloring_state_bound(log: &mut WitnessLog) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut nodes = 0;
    let mut graphs_used = 0;
    let mut violations = Vec::new();
    for q in 2..=4usize {
        let expr = ProblemExpr::VertPart(vec![ProblemExpr::Edgeless; q]);
        let mut used = 0;
        while used < 40 {
            let n = rng.gen_range(4..=12);
            let density = rng.gen_range(0.15..0.5);
            let g = random_graph(&mut rng, n, density);
            if heuristic_decomposition(&g, Strategy::MinFill).width() > 6 {
                continue;
            }
            used += 1;
            let verdict = solve(&expr, &g);
            let td = &verdict.decomposition;
            for t in 0..td.node_count() {
                nodes += 1;
                let bound = q.pow(td.bag(t).len() as u32);
                if verdict.stats.node_states[t] > bound {
                    violations.push(format!("q={q} node {t}: {} > {bound}", verdict.stats.node_states[t]));
                }
            }
            log.record(&expr, &g, &verdict);
        }
        graphs_used += used;
    }
    Outcome {
        pass: violations.is_empty(),
        detail: format!(
            "{graphs_used} graphs, {nodes} nodes, {} violations{}",
            violations.len(),
            first(&violations)
        ),
    }
}

fn min_vertex_cover(g: &Graph) -> usize {
    let vs: Vec<u32> = g.vertices().iter().copied().collect();
    let mut best = vs.len();
    for mask in 0u32..1 << vs.len() {
        let inside = |v: u32| mask >> vs.iter().position(|x| *x == v).unwrap() & 1 == 1;
        if g.edges().iter().all(|&(u, v)| inside(u) || inside(v)) {
            best = best.min(mask.count_ones() as usize);
        }
    }
    best
}

fn vertex_cover(log: &mut WitnessLog) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut mismatches = Vec::new();
    let total = 250;
    for _ in 0..total {
        let n = rng.gen_range(1..=7);
        let density = rng.gen_range(0.1..0.9);
        let g = random_graph(&mut rng, n, density);
        let expected = min_vertex_cover(&g);
        let mut found = None;
        for k in 0..=n {
            let expr = ProblemExpr::VertPart(vec![ProblemExpr::AtMost(k), ProblemExpr::Edgeless]);
            let verdict = solve(&expr, &g);
            log.record(&expr, &g, &verdict);
            if verdict.answer {
                found = Some(k as usize);
                break;
            }
        }
        if found != Some(expected) {
            mismatches.push(format!("{g:?}: solver {found:?}, brute force {expected}"));
        }
    }
    Outcome {
        pass: mismatches.is_empty(),
        detail: format!("{total} graphs, {} mismatches{}", mismatches.len(), first(&mismatches)),
    }
}

fn ladder(k: u32) -> Graph {
    let mut es = Vec::new();
    for i in 1..=k {
        es.push((i, i + k));
        if i < k {
            es.push((i, i + 1));
            es.push((i + k, i + k + 1));
        }
    }
    graph(2 * k, &es)
}

fn two_trees_scaling(log: &mut WitnessLog) -> Outcome {
    let expr = parse_problem("vertpart(tree,tree)").unwrap();
    let mut failures = Vec::new();
    let mut largest = Duration::ZERO;
    let mut width = 0;
    for k in 2..=50 {
        let g = ladder(k);
        let start = Instant::now();
        let verdict = solve(&expr, &g);
        let spent = start.elapsed();
        if !verdict.answer {
            failures.push(format!("2x{k} grid answered NO"));
        }
        if k == 50 {
            largest = spent;
            width = verdict.stats.width;
            if spent >= Duration::from_secs(60) {
                failures.push(format!("2x50 grid took {spent:?}"));
            }
        }
        log.record(&expr, &g, &verdict);
    }
    let triangles = graph(6, &[(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6)]);
    if solve(&expr, &triangles).answer {
        failures.push("two disjoint triangles answered YES".into());
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "k=2..50 checked, 2x50 in {:.2}s at width {width}, {} failures{}",
            largest.as_secs_f64(),
            failures.len(),
            first(&failures)
        ),
    }
}

fn path(n: u32) -> Graph {
    let es: Vec<(u32, u32)> = (1..n).map(|i| (i, i + 1)).collect();
    graph(n, &es)
}

fn linear_scaling() -> Outcome {
    let core = parse_problem("vertpart(edgeless,edgeless)").unwrap().to_core().unwrap();
    let fastest = |n: u32| {
        let g = path(n);
        let td = heuristic_decomposition(&g, Strategy::MinFill);
        (0..7)
            .map(|_| run(core.as_ref(), &g, &td, false).unwrap().stats.elapsed)
            .min()
            .unwrap()
    };
    fastest(500);
    let t1 = fastest(1000);
    let t2 = fastest(2000);
    let ratio = t2.as_secs_f64() / t1.as_secs_f64();
    Outcome {
        pass: (1.5..=3.0).contains(&ratio),
        detail: format!(
            "n=1000 {:.2}ms, n=2000 {:.2}ms, ratio {ratio:.2} (allowed 1.5..3.0)",
            t1.as_secs_f64() * 1e3,
            t2.as_secs_f64() * 1e3
        ),
    }
}

fn main() {
    let mut log = WitnessLog::default();
    let mut all_pass = true;
    let mut report = |id: u32, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        all_pass &= o.pass;
        println!(
            "criterion {id} {name}: {} ({}; {:.1}s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    };
    report(1, "oracle equivalence, all graphs on <=4 vertices", &mut || exhaustive_small(&mut log));
    report(2, "oracle equivalence, random graphs on 5 and 6 vertices", &mut || randomized(&mut log));
    report(3, "base cores against direct recognizers", &mut || base_cores(&mut log));
    report(4, "q-coloring state bound", &mut || coloring_state_bound(&mut log));
    report(5, "vertex cover minimum", &mut || vertex_cover(&mut log));
    report(6, "two-trees on 2xk grids", &mut || two_trees_scaling(&mut log));
    report(7, "witness soundness", &mut || Outcome {
        pass: log.failures.is_empty(),
        detail: format!(
            "{} YES witnesses replayed, {} failures{}",
            log.checked,
            log.failures.len(),
            first(&log.failures)
        ),
    });
    report(8, "linear scaling in path length", &mut linear_scaling);
    if !all_pass {
        std::process::exit(1);
    }
}
