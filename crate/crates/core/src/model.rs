//! The dynamic-core contract and the bottom-up driver that turns any core
//! into a decision procedure over a rooted tree decomposition.
//!
//! A core supplies its transition relations in two forms. The *guided* form
//! (`process_*`) enumerates parent states reachable from a given set of
//! feasible child states; the *relational* form (`check_*`) decides whether a
//! particular tuple belongs to the relation. For every core,
//! `process_one(g, g', F)` must equal the set of pairs `(m, m')` with
//! `m' ∈ F` and `check_one(g, g', m, m') == true`, and likewise for joins.
//!
//! Edge ownership: an edge is handled at the unique transition from a child
//! `t'` to its parent `t` where it lies inside `X_{t'}` but not inside `X_t`.
//! From bag graphs alone this is `E(child) \ E(bag)`. Because the root bag is
//! empty every edge has exactly one such transition.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::decomp::{normalize, validate, NodeId, RootedTreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Vertex};
use crate::state::{State, StateSet};

pub type Pairs = BTreeSet<(State, State)>;
pub type Triples = BTreeSet<(State, State, State)>;

/// What a partition core distributes among its parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionKind {
    Vertices,
    Edges,
}

/// An element of a vertex or edge partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Vertex(Vertex),
    Edge(Vertex, Vertex),
}

/// Element to part index (1-based, in argument order).
pub type PartitionMap = BTreeMap<Element, usize>;

pub trait DynamicCore: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    fn process_leaf(&self, bag: &Graph) -> StateSet;

    fn process_one(&self, bag: &Graph, child: &Graph, child_states: &StateSet) -> Pairs;

    fn process_two(
        &self,
        bag: &Graph,
        left: &Graph,
        left_states: &StateSet,
        right: &Graph,
        right_states: &StateSet,
    ) -> Triples;

    /// The subset of `states` accepted at a root with bag graph `root`.
    fn accept(&self, root: &Graph, states: &StateSet) -> StateSet;

    fn check_leaf(&self, bag: &Graph, state: &State) -> bool;

    fn check_one(&self, bag: &Graph, child: &Graph, state: &State, child_state: &State) -> bool;

    fn check_two(
        &self,
        bag: &Graph,
        left: &Graph,
        right: &Graph,
        state: &State,
        left_state: &State,
        right_state: &State,
    ) -> bool;

    fn check_accept(&self, root: &Graph, state: &State) -> bool;

    /// `Some` for cores whose top-level states assign bag elements to parts.
    fn partition_kind(&self) -> Option<PartitionKind> {
        None
    }
}

/// Edges handled at the transition from `child` into `bag`.
pub fn owned_edges<'a>(bag: &'a Graph, child: &'a Graph) -> impl Iterator<Item = Edge> + 'a {
    child.edges().iter().filter(|e| !bag.edges().contains(e)).copied()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub assignment: BTreeMap<NodeId, State>,
    pub derived_partition: Option<PartitionMap>,
}

#[derive(Clone, Debug, Default)]
pub struct RunStats {
    pub nodes: usize,
    pub width: usize,
    /// `|feasible_states(t)|` per node.
    pub node_states: Vec<usize>,
    /// Measured wall time spent computing each node.
    pub node_times: Vec<Duration>,
    pub elapsed: Duration,
}

impl RunStats {
    pub fn max_states(&self) -> usize {
        self.node_states.iter().copied().max().unwrap_or(0)
    }

    pub fn total_states(&self) -> usize {
        self.node_states.iter().sum()
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub answer: bool,
    pub witness: Option<Witness>,
    pub stats: RunStats,
    /// The normalized decomposition the DP ran on; witnesses refer to its nodes.
    pub decomposition: RootedTreeDecomposition,
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub witness: bool,
    /// Worker threads for independent subtrees; 1 runs sequentially.
    pub threads: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            witness: false,
            threads: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Support {
    Leaf,
    One(State),
    Two(State, State),
}

struct NodeTable {
    states: StateSet,
    support: Option<BTreeMap<State, Support>>,
    elapsed: Duration,
}

/// Feasible states at `t`, given the already computed sets of its children.
pub fn feasible_states(
    core: &dyn DynamicCore,
    bag_graphs: &[Graph],
    td: &RootedTreeDecomposition,
    t: NodeId,
    table: &[StateSet],
) -> StateSet {
    compute_node(core, bag_graphs, td, t, |c| &table[c], false).states
}

fn compute_node<'a>(
    core: &dyn DynamicCore,
    bag_graphs: &[Graph],
    td: &RootedTreeDecomposition,
    t: NodeId,
    child_states: impl Fn(NodeId) -> &'a StateSet,
    keep_support: bool,
) -> NodeTable {
    let start = Instant::now();
    let bag = &bag_graphs[t];
    let mut support = keep_support.then(BTreeMap::new);
    let states: StateSet = match *td.children(t) {
        [] => {
            let s = core.process_leaf(bag);
            if let Some(map) = support.as_mut() {
                map.extend(s.iter().map(|m| (m.clone(), Support::Leaf)));
            }
            s
        }
        [c] => {
            let pairs = core.process_one(bag, &bag_graphs[c], child_states(c));
            let mut out = StateSet::new();
            for (m, mc) in pairs {
                if let Some(map) = support.as_mut() {
                    map.entry(m.clone()).or_insert(Support::One(mc));
                }
                out.insert(m);
            }
            out
        }
        [a, b] => {
            let triples = core.process_two(
                bag,
                &bag_graphs[a],
                child_states(a),
                &bag_graphs[b],
                child_states(b),
            );
            let mut out = StateSet::new();
            for (m, ma, mb) in triples {
                if let Some(map) = support.as_mut() {
                    map.entry(m.clone()).or_insert(Support::Two(ma, mb));
                }
                out.insert(m);
            }
            out
        }
        _ => unreachable!("normalized decompositions have at most two children"),
    };
    NodeTable {
        states,
        support,
        elapsed: start.elapsed(),
    }
}

/// Decides membership with the plain boolean interface.
pub fn run(
    core: &dyn DynamicCore,
    graph: &Graph,
    td: &RootedTreeDecomposition,
    want_witness: bool,
) -> Result<Verdict> {
    run_with(
        core,
        graph,
        td,
        &RunOptions {
            witness: want_witness,
            ..RunOptions::default()
        },
    )
}

/// Runs the DP bottom-up and, on YES, optionally traces back a witness.
pub fn run_with(
    core: &dyn DynamicCore,
    graph: &Graph,
    td: &RootedTreeDecomposition,
    options: &RunOptions,
) -> Result<Verdict> {
    let violations = validate(graph, td);
    if !violations.is_empty() {
        return Err(Error::InvalidDecomposition(violations));
    }
    let td = if td.is_normalized() {
        td.clone()
    } else {
        normalize(graph, td)?
    };
    let start = Instant::now();
    let bag_graphs = td.bag_graphs(graph);
    let tables = if options.threads > 1 {
        solve_parallel(core, &bag_graphs, &td, options)?
    } else {
        solve_sequential(core, &bag_graphs, &td, options.witness)
    };

    let root = td.root();
    let accepted = core.accept(&bag_graphs[root], &tables[root].states);
    let answer = !accepted.is_empty();
    let witness = match accepted.first() {
        Some(top) if options.witness => {
            let assignment = trace_back(&td, &tables, top.clone());
            let derived_partition = match core.partition_kind() {
                Some(_) => Some(crate::combinators::extract_partition(&Witness {
                    assignment: assignment.clone(),
                    derived_partition: None,
                })?),
                None => None,
            };
            Some(Witness {
                assignment,
                derived_partition,
            })
        }
        _ => None,
    };

    let stats = RunStats {
        nodes: td.node_count(),
        width: td.width(),
        node_states: tables.iter().map(|t| t.states.len()).collect(),
        node_times: tables.iter().map(|t| t.elapsed).collect(),
        elapsed: start.elapsed(),
    };
    Ok(Verdict {
        answer,
        witness,
        stats,
        decomposition: td,
    })
}

fn solve_sequential(
    core: &dyn DynamicCore,
    bag_graphs: &[Graph],
    td: &RootedTreeDecomposition,
    keep_support: bool,
) -> Vec<NodeTable> {
    let mut tables: Vec<Option<NodeTable>> = (0..td.node_count()).map(|_| None).collect();
    for t in td.post_order() {
        let table = {
            let lookup = |c: NodeId| &tables[c].as_ref().expect("child computed").states;
            compute_node(core, bag_graphs, td, t, lookup, keep_support)
        };
        tables[t] = Some(table);
    }
    tables.into_iter().map(|t| t.expect("all nodes computed")).collect()
}

fn solve_parallel(
    core: &dyn DynamicCore,
    bag_graphs: &[Graph],
    td: &RootedTreeDecomposition,
    options: &RunOptions,
) -> Result<Vec<NodeTable>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let heights = td.heights();
    let max_height = heights.iter().copied().max().unwrap_or(0);
    let mut levels = vec![Vec::new(); max_height + 1];
    for (t, &h) in heights.iter().enumerate() {
        levels[h].push(t);
    }
    let mut tables: Vec<Option<NodeTable>> = (0..td.node_count()).map(|_| None).collect();
    pool.install(|| {
        for level in &levels {
            let computed: Vec<(NodeId, NodeTable)> = level
                .par_iter()
                .map(|&t| {
                    let lookup = |c: NodeId| &tables[c].as_ref().expect("child computed").states;
                    (t, compute_node(core, bag_graphs, td, t, lookup, options.witness))
                })
                .collect();
            for (t, table) in computed {
                tables[t] = Some(table);
            }
        }
    });
    Ok(tables.into_iter().map(|t| t.expect("all nodes computed")).collect())
}

fn trace_back(td: &RootedTreeDecomposition, tables: &[NodeTable], top: State) -> BTreeMap<NodeId, State> {
    let mut assignment = BTreeMap::new();
    let mut stack = vec![(td.root(), top)];
    while let Some((t, state)) = stack.pop() {
        let support = tables[t]
            .support
            .as_ref()
            .expect("support kept")
            .get(&state)
            .expect("feasible state has support")
            .clone();
        match (support, td.children(t)) {
            (Support::Leaf, _) => {}
            (Support::One(c), &[child]) => stack.push((child, c)),
            (Support::Two(a, b), &[left, right]) => {
                stack.push((left, a));
                stack.push((right, b));
            }
            _ => unreachable!("support shape matches node arity"),
        }
        assignment.insert(t, state);
    }
    assignment
}

/// Checks the witness conditions at every node using the relational checks.
pub fn check_witness(
    core: &dyn DynamicCore,
    graph: &Graph,
    td: &RootedTreeDecomposition,
    witness: &Witness,
) -> Result<bool> {
    for t in 0..td.node_count() {
        if !witness.assignment.contains_key(&t) {
            return Err(Error::Witness(format!("assignment misses node {t}")));
        }
    }
    let bag_graphs = td.bag_graphs(graph);
    let at = |t: NodeId| &witness.assignment[&t];
    let root = td.root();
    if !core.check_accept(&bag_graphs[root], at(root)) {
        return Ok(false);
    }
    for t in 0..td.node_count() {
        let ok = match *td.children(t) {
            [] => core.check_leaf(&bag_graphs[t], at(t)),
            [c] => core.check_one(&bag_graphs[t], &bag_graphs[c], at(t), at(c)),
            [a, b] => core.check_two(
                &bag_graphs[t],
                &bag_graphs[a],
                &bag_graphs[b],
                at(t),
                at(a),
                at(b),
            ),
            _ => return Err(Error::Witness(format!("node {t} has more than two children"))),
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}
