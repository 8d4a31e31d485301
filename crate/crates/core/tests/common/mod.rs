#![allow(dead_code)]

use std::collections::BTreeSet;

use dyncore::decomp::RootedTreeDecomposition;
use dyncore::graph::{Edge, Graph, Vertex};
use dyncore::state::{Part, State, StateSet};
use dyncore::{DynamicCore, ProblemExpr};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn graph(n: u32, edges: &[(u32, u32)]) -> Graph {
    Graph::with_vertices_1_to_n(n, edges.iter().copied()).unwrap()
}

pub fn all_pairs(n: u32) -> Vec<Edge> {
    (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect()
}

/// Every labeled graph on vertices `1..=n`.
pub fn all_graphs(n: u32) -> Vec<Graph> {
    let pairs = all_pairs(n);
    (0u64..1 << pairs.len())
        .map(|mask| {
            let es: Vec<Edge> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, e)| *e)
                .collect();
            graph(n, &es)
        })
        .collect()
}

pub fn random_graph(rng: &mut ChaCha8Rng, n: u32, p: f64) -> Graph {
    let es: Vec<Edge> = all_pairs(n).into_iter().filter(|_| rng.gen_bool(p)).collect();
    graph(n, &es)
}

fn set_partitions(items: &[Vertex]) -> Vec<Vec<Vec<Vertex>>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![vec![]];
    };
    let mut out = Vec::new();
    for p in set_partitions(rest) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].push(first);
            out.push(q);
        }
        let mut q = p;
        q.push(vec![first]);
        out.push(q);
    }
    out
}

fn assignments(count: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..count {
        out = out
            .into_iter()
            .flat_map(|a| {
                (0..parts).map(move |i| {
                    let mut b = a.clone();
                    b.push(i);
                    b
                })
            })
            .collect();
    }
    out
}

fn product(sets: &[Vec<State>]) -> Vec<Vec<State>> {
    let mut out = vec![vec![]];
    for set in sets {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                set.iter().map(move |s| {
                    let mut v = prefix.clone();
                    v.push(s.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// A superset of every state the core for `expr` can hold at a node whose
/// bag graph is `bag`, built from the state shapes alone. `max_count`
/// bounds the counters and the closed-component counts.
pub fn candidate_states(expr: &ProblemExpr, bag: &Graph, max_count: u32) -> Vec<State> {
    let vertices: Vec<Vertex> = bag.vertices().iter().copied().collect();
    match expr {
        ProblemExpr::Any | ProblemExpr::Edgeless => vec![State::Top],
        ProblemExpr::AtMost(_) => (0..=max_count).map(State::Count).collect(),
        ProblemExpr::Tree | ProblemExpr::Forest => set_partitions(&vertices)
            .into_iter()
            .flat_map(|p| (0..=max_count).map(move |c| State::blocks(p.clone(), c)))
            .collect(),
        ProblemExpr::And(xs) => {
            let sets: Vec<Vec<State>> = xs.iter().map(|x| candidate_states(x, bag, max_count)).collect();
            product(&sets).into_iter().map(State::Tuple).collect()
        }
        ProblemExpr::Or(xs) => {
            let sets: Vec<Vec<State>> = xs
                .iter()
                .map(|x| {
                    let mut v = candidate_states(x, bag, max_count);
                    v.push(State::Bot);
                    v
                })
                .collect();
            product(&sets).into_iter().map(State::Tuple).collect()
        }
        ProblemExpr::VertPart(xs) | ProblemExpr::GraphPart(_, xs) => {
            let mut out = Vec::new();
            for a in assignments(vertices.len(), xs.len()) {
                let parts: Vec<BTreeSet<Vertex>> = (0..xs.len())
                    .map(|i| vertices.iter().zip(&a).filter(|(_, j)| **j == i).map(|(v, _)| *v).collect())
                    .collect();
                let sets: Vec<Vec<State>> = xs
                    .iter()
                    .zip(&parts)
                    .map(|(x, p)| {
                        let sub = bag.induced_subgraph(p).unwrap();
                        candidate_states(x, &sub, max_count)
                            .into_iter()
                            .map(|m| State::assigned(m, Part::vertices(p.iter().copied())))
                            .collect()
                    })
                    .collect();
                for t in product(&sets) {
                    if let ProblemExpr::GraphPart(..) = expr {
                        for q in 0..=max_count {
                            let mut t = t.clone();
                            t.push(State::Count(q));
                            out.push(State::Tuple(t));
                        }
                    } else {
                        out.push(State::Tuple(t));
                    }
                }
            }
            out
        }
        ProblemExpr::EdgePart(xs) => {
            let edges: Vec<Edge> = bag.edges().iter().copied().collect();
            let mut out = Vec::new();
            for a in assignments(edges.len(), xs.len()) {
                let sets: Vec<Vec<State>> = xs
                    .iter()
                    .enumerate()
                    .map(|(i, x)| {
                        let part: Vec<Edge> =
                            edges.iter().zip(&a).filter(|(_, j)| **j == i).map(|(e, _)| *e).collect();
                        let sub = bag.edge_subgraph(&part).unwrap();
                        candidate_states(x, &sub, max_count)
                            .into_iter()
                            .map(|m| State::assigned(m, Part::edges(part.iter().copied())))
                            .collect()
                    })
                    .collect();
                out.extend(product(&sets).into_iter().map(State::Tuple));
            }
            out
        }
    }
}

/// Decides membership using only the relational `check_*` operations:
/// the set of states at each node that some assignment of its subtree
/// supports, computed bottom-up over `candidates`.
pub fn relational_answer(
    core: &dyn DynamicCore,
    g: &Graph,
    td: &RootedTreeDecomposition,
    candidates: &dyn Fn(&Graph) -> Vec<State>,
) -> bool {
    let bags = td.bag_graphs(g);
    let mut supported: Vec<StateSet> = vec![StateSet::new(); td.node_count()];
    for t in td.post_order() {
        let cand = candidates(&bags[t]);
        supported[t] = match *td.children(t) {
            [] => cand.into_iter().filter(|s| core.check_leaf(&bags[t], s)).collect(),
            [c] => cand
                .into_iter()
                .filter(|s| supported[c].iter().any(|sc| core.check_one(&bags[t], &bags[c], s, sc)))
                .collect(),
            [a, b] => cand
                .into_iter()
                .filter(|s| {
                    supported[a].iter().any(|sa| {
                        supported[b]
                            .iter()
                            .any(|sb| core.check_two(&bags[t], &bags[a], &bags[b], s, sa, sb))
                    })
                })
                .collect(),
            _ => unreachable!("normalized decompositions are binary"),
        };
    }
    let root = td.root();
    supported[root].iter().any(|s| core.check_accept(&bags[root], s))
}
