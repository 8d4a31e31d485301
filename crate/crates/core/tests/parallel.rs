mod common;

use common::random_graph;
use dyncore::decomp::{heuristic_decomposition, Strategy};
use dyncore::graph::Graph;
use dyncore::{parse_problem, run_with, RunOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grid(k: u32) -> Graph {
    let mut es = Vec::new();
    for i in 1..=k {
        es.push((i, i + k));
        if i < k {
            es.push((i, i + 1));
            es.push((i + k, i + k + 1));
        }
    }
    Graph::with_vertices_1_to_n(2 * k, es).unwrap()
}

#[test]
fn thread_count_does_not_change_results() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut graphs: Vec<Graph> = (0..20).map(|_| random_graph(&mut rng, 9, 0.35)).collect();
    graphs.push(grid(12));
    for text in ["vertpart(edgeless,edgeless,edgeless)", "vertpart(tree,tree)", "graphpart(3; forest, edgeless)"] {
        let core = parse_problem(text).unwrap().to_core().unwrap();
        for g in &graphs {
            let td = heuristic_decomposition(g, Strategy::MinFill);
            let runs: Vec<_> = [1, 2, 8]
                .iter()
                .map(|&threads| {
                    let v = run_with(core.as_ref(), g, &td, &RunOptions { witness: true, threads }).unwrap();
                    (v.answer, v.witness, v.stats.node_states, v.decomposition)
                })
                .collect();
            assert!(runs.windows(2).all(|w| w[0] == w[1]), "{text}");
        }
    }
}
