//! Cores for the base graph classes: all graphs, edgeless graphs, graphs with
//! at most `p` vertices, forests and trees.
//!
//! Empty-graph convention: it belongs to every class here except trees.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{Graph, Vertex};
use crate::model::{owned_edges, DynamicCore, Pairs, Triples};
use crate::state::{BlockPartition, State, StateSet};

/// Recognizes every graph.
#[derive(Clone, Copy, Debug, Default)]
pub struct AnyCore;

pub fn any_core() -> AnyCore {
    AnyCore
}

impl DynamicCore for AnyCore {
    fn name(&self) -> String {
        "any".into()
    }

    fn process_leaf(&self, _bag: &Graph) -> StateSet {
        StateSet::from([State::Top])
    }

    fn process_one(&self, _bag: &Graph, _child: &Graph, child_states: &StateSet) -> Pairs {
        top_pairs(child_states, true)
    }

    fn process_two(&self, _: &Graph, _: &Graph, left: &StateSet, _: &Graph, right: &StateSet) -> Triples {
        top_triples(left, right, true)
    }

    fn accept(&self, _root: &Graph, states: &StateSet) -> StateSet {
        states.iter().filter(|s| **s == State::Top).cloned().collect()
    }

    fn check_leaf(&self, _bag: &Graph, state: &State) -> bool {
        *state == State::Top
    }

    fn check_one(&self, _: &Graph, _: &Graph, state: &State, child_state: &State) -> bool {
        *state == State::Top && *child_state == State::Top
    }

    fn check_two(&self, _: &Graph, _: &Graph, _: &Graph, s: &State, a: &State, b: &State) -> bool {
        [s, a, b].iter().all(|x| **x == State::Top)
    }

    fn check_accept(&self, _root: &Graph, state: &State) -> bool {
        *state == State::Top
    }
}

fn top_pairs(child_states: &StateSet, allowed: bool) -> Pairs {
    if allowed && child_states.contains(&State::Top) {
        Pairs::from([(State::Top, State::Top)])
    } else {
        Pairs::new()
    }
}

fn top_triples(left: &StateSet, right: &StateSet, allowed: bool) -> Triples {
    if allowed && left.contains(&State::Top) && right.contains(&State::Top) {
        Triples::from([(State::Top, State::Top, State::Top)])
    } else {
        Triples::new()
    }
}

/// Recognizes graphs without edges. Every process set is `{⊤}` when the
/// current bag graph has no edges and empty otherwise.
#[derive(Clone, Copy, Debug, Default)]
pub struct EdgelessCore;

pub fn edgeless_core() -> EdgelessCore {
    EdgelessCore
}

impl DynamicCore for EdgelessCore {
    fn name(&self) -> String {
        "edgeless".into()
    }

    fn process_leaf(&self, bag: &Graph) -> StateSet {
        if bag.edge_count() == 0 {
            StateSet::from([State::Top])
        } else {
            StateSet::new()
        }
    }

    fn process_one(&self, bag: &Graph, _child: &Graph, child_states: &StateSet) -> Pairs {
        top_pairs(child_states, bag.edge_count() == 0)
    }

    fn process_two(&self, bag: &Graph, _: &Graph, left: &StateSet, _: &Graph, right: &StateSet) -> Triples {
        top_triples(left, right, bag.edge_count() == 0)
    }

    fn accept(&self, _root: &Graph, states: &StateSet) -> StateSet {
        states.iter().filter(|s| **s == State::Top).cloned().collect()
    }

    fn check_leaf(&self, bag: &Graph, state: &State) -> bool {
        bag.edge_count() == 0 && *state == State::Top
    }

    fn check_one(&self, bag: &Graph, _: &Graph, state: &State, child_state: &State) -> bool {
        bag.edge_count() == 0 && *state == State::Top && *child_state == State::Top
    }

    fn check_two(&self, bag: &Graph, _: &Graph, _: &Graph, s: &State, a: &State, b: &State) -> bool {
        bag.edge_count() == 0 && [s, a, b].iter().all(|x| **x == State::Top)
    }

    fn check_accept(&self, _root: &Graph, state: &State) -> bool {
        *state == State::Top
    }
}

/// Recognizes graphs with at most `p` vertices by counting forgotten vertices.
#[derive(Clone, Copy, Debug)]
pub struct BoundedSizeCore {
    pub limit: u32,
}

pub fn bounded_size_core(limit: u32) -> BoundedSizeCore {
    BoundedSizeCore { limit }
}

fn forgotten(bag: &Graph, child: &Graph) -> u32 {
    child.vertices().difference(bag.vertices()).count() as u32
}

fn forgotten_two(bag: &Graph, left: &Graph, right: &Graph) -> u32 {
    left.vertices()
        .union(right.vertices())
        .filter(|v| !bag.contains_vertex(**v))
        .count() as u32
}

impl DynamicCore for BoundedSizeCore {
    fn name(&self) -> String {
        format!("atmost({})", self.limit)
    }

    fn process_leaf(&self, _bag: &Graph) -> StateSet {
        StateSet::from([State::Count(0)])
    }

    fn process_one(&self, bag: &Graph, child: &Graph, child_states: &StateSet) -> Pairs {
        let add = forgotten(bag, child);
        child_states
            .iter()
            .filter_map(|s| {
                let q = s.as_count()? + add;
                (q <= self.limit).then(|| (State::Count(q), s.clone()))
            })
            .collect()
    }

    fn process_two(&self, bag: &Graph, left: &Graph, ls: &StateSet, right: &Graph, rs: &StateSet) -> Triples {
        let add = forgotten_two(bag, left, right);
        let mut out = Triples::new();
        for a in ls {
            let Some(qa) = a.as_count() else { continue };
            for b in rs {
                let Some(qb) = b.as_count() else { continue };
                let q = qa + qb + add;
                if q <= self.limit {
                    out.insert((State::Count(q), a.clone(), b.clone()));
                }
            }
        }
        out
    }

    fn accept(&self, root: &Graph, states: &StateSet) -> StateSet {
        states.iter().filter(|s| self.check_accept(root, s)).cloned().collect()
    }

    fn check_leaf(&self, _bag: &Graph, state: &State) -> bool {
        *state == State::Count(0)
    }

    fn check_one(&self, bag: &Graph, child: &Graph, state: &State, child_state: &State) -> bool {
        match (state.as_count(), child_state.as_count()) {
            (Some(q), Some(qc)) => q <= self.limit && q == qc + forgotten(bag, child),
            _ => false,
        }
    }

    fn check_two(&self, bag: &Graph, left: &Graph, right: &Graph, s: &State, a: &State, b: &State) -> bool {
        match (s.as_count(), a.as_count(), b.as_count()) {
            (Some(q), Some(qa), Some(qb)) => q <= self.limit && q == qa + qb + forgotten_two(bag, left, right),
            _ => false,
        }
    }

    fn check_accept(&self, _root: &Graph, state: &State) -> bool {
        state.as_count().is_some_and(|q| q <= self.limit)
    }
}

/// Recognizes forests, or trees when `connected` is set.
///
/// States are `Blocks(π, closed)`: `π` partitions the bag into the connected
/// components of the edges handled so far, and `closed` counts components
/// whose vertices have all been forgotten.
#[derive(Clone, Copy, Debug)]
pub struct ForestCore {
    connected: bool,
}

pub fn forest_core() -> ForestCore {
    ForestCore { connected: false }
}

pub fn tree_core() -> ForestCore {
    ForestCore { connected: true }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

impl ForestCore {
    fn leaf_state(bag: &Graph) -> State {
        State::blocks(bag.vertices().iter().map(|&v| vec![v]), 0)
    }

    /// The unique parent state reached from the given children, or `None`
    /// when the combination closes a cycle or breaks connectivity.
    fn step(&self, bag: &Graph, children: &[(&Graph, &State)]) -> Option<State> {
        let mut universe: BTreeSet<Vertex> = bag.vertices().clone();
        for (g, _) in children {
            universe.extend(g.vertices().iter().copied());
        }
        let index: BTreeMap<Vertex, usize> = universe.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut uf = UnionFind::new(universe.len());
        let mut closed = 0u32;

        for (g, state) in children {
            let State::Blocks { partition, closed: c } = state else {
                return None;
            };
            if !partition.partitions(g.vertices()) {
                return None;
            }
            closed += c;
            for block in partition.blocks() {
                let first = index[&block[0]];
                for v in &block[1..] {
                    if !uf.union(first, index[v]) {
                        return None;
                    }
                }
            }
        }
        for (g, _) in children {
            for (u, v) in owned_edges(bag, g) {
                if !uf.union(index[&u], index[&v]) {
                    return None;
                }
            }
        }

        let mut alive: BTreeMap<usize, Vec<Vertex>> = BTreeMap::new();
        let mut roots = BTreeSet::new();
        for &v in &universe {
            let r = uf.find(index[&v]);
            roots.insert(r);
            if bag.contains_vertex(v) {
                alive.entry(r).or_default().push(v);
            }
        }
        closed += (roots.len() - alive.len()) as u32;

        if self.connected && (closed >= 2 || (closed >= 1 && !bag.is_empty())) {
            return None;
        }
        Some(State::Blocks {
            partition: BlockPartition::new(alive.into_values()),
            closed,
        })
    }

    fn accepts(&self, root: &Graph, state: &State) -> bool {
        let State::Blocks { partition, closed } = state else {
            return false;
        };
        if !partition.partitions(root.vertices()) {
            return false;
        }
        if !self.connected {
            return true;
        }
        let alive = partition.blocks().len();
        (*closed == 1 && alive == 0) || (*closed == 0 && alive == 1)
    }
}

impl DynamicCore for ForestCore {
    fn name(&self) -> String {
        if self.connected { "tree" } else { "forest" }.into()
    }

    fn process_leaf(&self, bag: &Graph) -> StateSet {
        StateSet::from([Self::leaf_state(bag)])
    }

    fn process_one(&self, bag: &Graph, child: &Graph, child_states: &StateSet) -> Pairs {
        child_states
            .iter()
            .filter_map(|s| self.step(bag, &[(child, s)]).map(|m| (m, s.clone())))
            .collect()
    }

    fn process_two(&self, bag: &Graph, left: &Graph, ls: &StateSet, right: &Graph, rs: &StateSet) -> Triples {
        let mut out = Triples::new();
        for a in ls {
            for b in rs {
                if let Some(m) = self.step(bag, &[(left, a), (right, b)]) {
                    out.insert((m, a.clone(), b.clone()));
                }
            }
        }
        out
    }

    fn accept(&self, root: &Graph, states: &StateSet) -> StateSet {
        states.iter().filter(|s| self.accepts(root, s)).cloned().collect()
    }

    fn check_leaf(&self, bag: &Graph, state: &State) -> bool {
        *state == Self::leaf_state(bag)
    }

    fn check_one(&self, bag: &Graph, child: &Graph, state: &State, child_state: &State) -> bool {
        self.step(bag, &[(child, child_state)]).as_ref() == Some(state)
    }

    fn check_two(&self, bag: &Graph, left: &Graph, right: &Graph, s: &State, a: &State, b: &State) -> bool {
        self.step(bag, &[(left, a), (right, b)]).as_ref() == Some(s)
    }

    fn check_accept(&self, root: &Graph, state: &State) -> bool {
        self.accepts(root, state)
    }
}
