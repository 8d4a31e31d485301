//! Brute-force reference deciders, independent of the dynamic programming
//! engine. Class membership is checked straight from the definitions and
//! partitions are found by trying every assignment.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::expr::ProblemExpr;
use crate::graph::{Edge, Graph, Vertex};

/// Size limits above which the exhaustive partition searches refuse to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_vertices: usize,
    pub max_edges: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_vertices: 10,
            max_edges: 14,
        }
    }
}

fn component_count_and_acyclic(g: &Graph) -> (usize, bool) {
    let adj = g.adjacency();
    let mut seen: BTreeSet<Vertex> = BTreeSet::new();
    let mut components = 0;
    let mut acyclic = true;
    for &start in g.vertices() {
        if seen.contains(&start) {
            continue;
        }
        components += 1;
        seen.insert(start);
        // (vertex, parent) pairs; a visited neighbour other than the parent closes a cycle.
        let mut stack = vec![(start, None)];
        while let Some((v, parent)) = stack.pop() {
            for &w in &adj[&v] {
                if Some(w) == parent {
                    continue;
                }
                if !seen.insert(w) {
                    acyclic = false;
                    continue;
                }
                stack.push((w, Some(v)));
            }
        }
    }
    (components, acyclic)
}

pub fn is_forest(g: &Graph) -> bool {
    component_count_and_acyclic(g).1
}

/// Connected, acyclic and nonempty.
pub fn is_tree(g: &Graph) -> bool {
    let (c, acyclic) = component_count_and_acyclic(g);
    c == 1 && acyclic
}

/// Decides a partition-free expression directly.
pub fn oracle_recognize(expr: &ProblemExpr, g: &Graph) -> Result<bool> {
    Ok(match expr {
        ProblemExpr::Any => true,
        ProblemExpr::Edgeless => g.edge_count() == 0,
        ProblemExpr::AtMost(p) => g.vertex_count() <= *p as usize,
        ProblemExpr::Tree => is_tree(g),
        ProblemExpr::Forest => is_forest(g),
        ProblemExpr::And(xs) => {
            for x in xs {
                if !oracle_recognize(x, g)? {
                    return Ok(false);
                }
            }
            true
        }
        ProblemExpr::Or(xs) => {
            for x in xs {
                if oracle_recognize(x, g)? {
                    return Ok(true);
                }
            }
            false
        }
        ProblemExpr::VertPart(_) | ProblemExpr::EdgePart(_) | ProblemExpr::GraphPart(..) => {
            return Err(Error::Config(format!("oracle_recognize does not take partitions: {expr}")))
        }
    })
}

/// Decides any expression, nesting partitions as needed.
pub fn oracle_decide(expr: &ProblemExpr, g: &Graph, cfg: &OracleConfig) -> Result<bool> {
    match expr {
        ProblemExpr::VertPart(xs) => oracle_vertpart(xs, g, cfg),
        ProblemExpr::EdgePart(xs) => oracle_edgepart(xs, g, cfg),
        ProblemExpr::GraphPart(p, xs) => oracle_graphpart(*p, xs, g, cfg),
        ProblemExpr::And(xs) => {
            for x in xs {
                if !oracle_decide(x, g, cfg)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        ProblemExpr::Or(xs) => {
            for x in xs {
                if oracle_decide(x, g, cfg)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        atom => oracle_recognize(atom, g),
    }
}

fn check_arity(exprs: &[ProblemExpr]) -> Result<()> {
    if exprs.len() < 2 {
        return Err(Error::Config("a partition needs at least two parts".into()));
    }
    Ok(())
}

/// Tries every map `items -> 0..parts` until `accept` holds.
fn search<T: Copy>(items: &[T], parts: usize, mut accept: impl FnMut(&[usize]) -> Result<bool>) -> Result<bool> {
    let mut digits = vec![0usize; items.len()];
    loop {
        if accept(&digits)? {
            return Ok(true);
        }
        let mut k = items.len();
        loop {
            if k == 0 {
                return Ok(false);
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < parts {
                break;
            }
            digits[k] = 0;
        }
    }
}

fn vertex_parts(vertices: &[Vertex], digits: &[usize], parts: usize) -> Vec<BTreeSet<Vertex>> {
    let mut out = vec![BTreeSet::new(); parts];
    for (v, &i) in vertices.iter().zip(digits) {
        out[i].insert(*v);
    }
    out
}

fn vertex_search(p: Option<u32>, exprs: &[ProblemExpr], g: &Graph, cfg: &OracleConfig) -> Result<bool> {
    check_arity(exprs)?;
    if g.vertex_count() > cfg.max_vertices {
        return Err(Error::OracleRefused(format!(
            "{} vertices exceed the limit of {}",
            g.vertex_count(),
            cfg.max_vertices
        )));
    }
    let vertices: Vec<Vertex> = g.vertices().iter().copied().collect();
    let index: BTreeMap<Vertex, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    search(&vertices, exprs.len(), |digits| {
        if let Some(p) = p {
            let transversal = g
                .edges()
                .iter()
                .filter(|(u, v)| digits[index[u]] != digits[index[v]])
                .count();
            if transversal > p as usize {
                return Ok(false);
            }
        }
        for (x, part) in exprs.iter().zip(vertex_parts(&vertices, digits, exprs.len())) {
            if !oracle_decide(x, &g.induced_subgraph(&part)?, cfg)? {
                return Ok(false);
            }
        }
        Ok(true)
    })
}

/// Some vertex partition puts every induced part in its class.
pub fn oracle_vertpart(exprs: &[ProblemExpr], g: &Graph, cfg: &OracleConfig) -> Result<bool> {
    vertex_search(None, exprs, g, cfg)
}

/// As [`oracle_vertpart`], with at most `p` edges between different parts.
pub fn oracle_graphpart(p: u32, exprs: &[ProblemExpr], g: &Graph, cfg: &OracleConfig) -> Result<bool> {
    vertex_search(Some(p), exprs, g, cfg)
}

/// Some edge partition puts every spanning part `(V(G), S_i)` in its class.
pub fn oracle_edgepart(exprs: &[ProblemExpr], g: &Graph, cfg: &OracleConfig) -> Result<bool> {
    check_arity(exprs)?;
    if g.edge_count() > cfg.max_edges {
        return Err(Error::OracleRefused(format!(
            "{} edges exceed the limit of {}",
            g.edge_count(),
            cfg.max_edges
        )));
    }
    let edges: Vec<Edge> = g.edges().iter().copied().collect();
    search(&edges, exprs.len(), |digits| {
        for (i, x) in exprs.iter().enumerate() {
            let part: Vec<Edge> = edges.iter().zip(digits).filter(|(_, d)| **d == i).map(|(e, _)| *e).collect();
            if !oracle_decide(x, &g.edge_subgraph(&part)?, cfg)? {
                return Ok(false);
            }
        }
        Ok(true)
    })
}

/// Edges of `g` whose endpoints get different parts in `part_of`.
pub fn transversal_edges(g: &Graph, part_of: &BTreeMap<Vertex, usize>) -> usize {
    g.edges().iter().filter(|(u, v)| part_of.get(u) != part_of.get(v)).count()
}

/// Outcome of replaying a claimed partition against its part classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replay {
    /// Every element placed in a valid part and every part in its class.
    pub parts_ok: bool,
    /// Edges between different vertex parts; zero for edge partitions.
    pub transversal: usize,
    /// `parts_ok` and, for a budgeted partition, `transversal <= p`.
    pub valid: bool,
}

/// Checks a partition given as `element -> part` (parts numbered from 1)
/// against the top-level partition expression `expr`.
pub fn replay_partition(
    expr: &ProblemExpr,
    g: &Graph,
    partition: &BTreeMap<crate::model::Element, usize>,
    cfg: &OracleConfig,
) -> Result<Replay> {
    use crate::model::Element;
    let (exprs, budget, by_edges) = match expr {
        ProblemExpr::VertPart(xs) => (xs, None, false),
        ProblemExpr::GraphPart(p, xs) => (xs, Some(*p), false),
        ProblemExpr::EdgePart(xs) => (xs, None, true),
        _ => return Err(Error::Config(format!("{expr} is not a partition problem"))),
    };
    let l = exprs.len();
    let in_range = |i: usize| (1..=l).contains(&i);
    let mut parts_ok = partition.values().all(|&i| in_range(i));
    let mut transversal = 0;
    if by_edges {
        let mut parts = vec![Vec::new(); l];
        for e in g.edges() {
            match partition.get(&Element::Edge(e.0, e.1)) {
                Some(&i) if in_range(i) => parts[i - 1].push(*e),
                _ => parts_ok = false,
            }
        }
        parts_ok &= partition.len() == g.edge_count();
        if parts_ok {
            for (x, part) in exprs.iter().zip(&parts) {
                parts_ok &= oracle_decide(x, &g.edge_subgraph(part)?, cfg)?;
            }
        }
    } else {
        let mut part_of = BTreeMap::new();
        for &v in g.vertices() {
            match partition.get(&Element::Vertex(v)) {
                Some(&i) if in_range(i) => {
                    part_of.insert(v, i);
                }
                _ => parts_ok = false,
            }
        }
        parts_ok &= partition.len() == g.vertex_count();
        if parts_ok {
            for (i, x) in exprs.iter().enumerate() {
                let part: BTreeSet<Vertex> =
                    part_of.iter().filter(|(_, p)| **p == i + 1).map(|(v, _)| *v).collect();
                parts_ok &= oracle_decide(x, &g.induced_subgraph(&part)?, cfg)?;
            }
            transversal = transversal_edges(g, &part_of);
        }
    }
    let valid = parts_ok && budget.is_none_or(|p| transversal <= p as usize);
    Ok(Replay {
        parts_ok,
        transversal,
        valid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_problem;

    fn graph(n: u32, edges: &[(u32, u32)]) -> Graph {
        Graph::with_vertices_1_to_n(n, edges.iter().copied()).unwrap()
    }

    fn k(n: u32) -> Graph {
        let es: Vec<_> = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect();
        graph(n, &es)
    }

    fn c(n: u32) -> Graph {
        let es: Vec<_> = (1..=n).map(|i| (i, i % n + 1)).collect();
        graph(n, &es)
    }

    fn decide(text: &str, g: &Graph) -> bool {
        oracle_decide(&parse_problem(text).unwrap(), g, &OracleConfig::default()).unwrap()
    }

    #[test]
    fn recognizers() {
        let p3 = graph(3, &[(1, 2), (2, 3)]);
        assert!(decide("tree", &p3));
        assert!(!decide("forest", &c(4)));
        assert!(!decide("and(forest, atmost(2))", &p3));
        assert!(!decide("tree", &Graph::empty()));
        assert!(decide("forest", &Graph::empty()));
        assert!(decide("tree", &graph(1, &[])));
        assert!(!decide("tree", &graph(2, &[])));
        assert!(decide("or(edgeless, tree)", &p3));
        assert!(matches!(
            oracle_recognize(&parse_problem("vertpart(any,any)").unwrap(), &p3),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn partitions() {
        let p3 = graph(3, &[(1, 2), (2, 3)]);
        assert!(decide("vertpart(edgeless,edgeless,edgeless)", &k(3)));
        assert!(!decide("vertpart(edgeless,edgeless)", &c(5)));
        assert!(decide("vertpart(tree,tree)", &c(4)));
        assert!(decide("graphpart(2; edgeless, edgeless)", &p3));
        assert!(!decide("graphpart(1; edgeless, edgeless)", &p3));
        assert!(decide("graphpart(0; any, any)", &k(3)));
        assert!(decide("edgepart(forest,forest)", &k(4)));
        assert!(!decide("edgepart(forest,forest)", &k(5)));
        assert!(!decide("edgepart(tree,tree)", &c(4)));
    }

    #[test]
    fn replay() {
        use crate::model::Element;
        let p3 = graph(3, &[(1, 2), (2, 3)]);
        let e = parse_problem("graphpart(2; edgeless, edgeless)").unwrap();
        let cfg = OracleConfig::default();
        let map: BTreeMap<Element, usize> =
            [(Element::Vertex(1), 1), (Element::Vertex(2), 2), (Element::Vertex(3), 1)].into();
        let r = replay_partition(&e, &p3, &map, &cfg).unwrap();
        assert_eq!((r.parts_ok, r.transversal, r.valid), (true, 2, true));
        let tight = parse_problem("graphpart(1; edgeless, edgeless)").unwrap();
        assert!(!replay_partition(&tight, &p3, &map, &cfg).unwrap().valid);
        let mut partial = map.clone();
        partial.remove(&Element::Vertex(3));
        assert!(!replay_partition(&e, &p3, &partial, &cfg).unwrap().parts_ok);

        let edges = parse_problem("edgepart(tree,tree)").unwrap();
        let split: BTreeMap<Element, usize> = [(Element::Edge(1, 2), 1), (Element::Edge(2, 3), 2)].into();
        assert!(!replay_partition(&edges, &p3, &split, &cfg).unwrap().valid);
        assert!(replay_partition(&parse_problem("tree").unwrap(), &p3, &split, &cfg).is_err());
    }

    #[test]
    fn refuses_large_inputs() {
        let cfg = OracleConfig {
            max_vertices: 3,
            max_edges: 5,
        };
        let e = parse_problem("vertpart(any,any)").unwrap();
        assert!(matches!(oracle_decide(&e, &k(4), &cfg), Err(Error::OracleRefused(_))));
        let e = parse_problem("edgepart(any,any)").unwrap();
        assert!(matches!(oracle_decide(&e, &k(4), &cfg), Err(Error::OracleRefused(_))));
    }
}
