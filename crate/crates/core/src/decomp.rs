//! Rooted tree decompositions.
//!
//! Node ids are dense indices `0..node_count()`. When reading a PACE `.td`
//! file, bag `b i` becomes node `i - 1`; writing adds the offset back.
//!
//! A decomposition is *normalized* when its root bag is empty, every node has
//! at most two children, and `|Y_t| <= |X_t| + 1` where `Y_t` is the union of
//! `X_t` with the bags of the children of `t`. [`normalize`] produces this
//! form as a nice decomposition (empty leaves, one-vertex introduce and forget
//! steps, joins with identical bags). After contracting tree edges whose bags
//! are nested, the output has `O(width * |V(G)|)` nodes plus one node per
//! surviving join.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTreeDecomposition {
    bags: Vec<Vec<Vertex>>,
    children: Vec<Vec<NodeId>>,
    parent: Vec<Option<NodeId>>,
    root: NodeId,
    // Y_t, computed once.
    spans: Vec<Vec<Vertex>>,
}

/// One reason a decomposition fails to be valid for a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Tree-shape problems: bad root, parent/child mismatch, unreachable nodes.
    Structure(String),
    UnknownVertex { node: NodeId, vertex: Vertex },
    /// (T1)
    UncoveredVertex(Vertex),
    /// (T2)
    UncoveredEdge(Vertex, Vertex),
    /// (T3)
    Disconnected(Vertex),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Structure(msg) => write!(f, "tree structure: {msg}"),
            Violation::UnknownVertex { node, vertex } => {
                write!(f, "bag of node {node} contains unknown vertex {vertex}")
            }
            Violation::UncoveredVertex(v) => write!(f, "(T1) vertex {v} appears in no bag"),
            Violation::UncoveredEdge(u, v) => write!(f, "(T2) edge {u}-{v} is contained in no bag"),
            Violation::Disconnected(v) => {
                write!(f, "(T3) bags containing vertex {v} do not form a connected subtree")
            }
        }
    }
}

/// Elimination heuristic used by [`heuristic_decomposition`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    MinFill,
    MinDegree,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min-fill" => Ok(Strategy::MinFill),
            "min-degree" => Ok(Strategy::MinDegree),
            other => Err(Error::Config(format!("unknown heuristic `{other}`"))),
        }
    }
}

impl RootedTreeDecomposition {
    /// Builds a decomposition from per-node bags and parent pointers.
    /// Exactly one node must have no parent; it becomes the root.
    pub fn from_parents(bags: Vec<Vec<Vertex>>, parent: Vec<Option<NodeId>>) -> Result<Self> {
        if bags.len() != parent.len() {
            return Err(Error::Domain("bags and parents differ in length".into()));
        }
        if bags.is_empty() {
            return Err(Error::Domain("a decomposition needs at least one node".into()));
        }
        let n = bags.len();
        let mut root = None;
        let mut children = vec![Vec::new(); n];
        for (t, p) in parent.iter().enumerate() {
            match *p {
                None if root.is_some() => {
                    return Err(Error::Domain("more than one root".into()));
                }
                None => root = Some(t),
                Some(p) if p >= n => {
                    return Err(Error::Domain(format!("node {t} has unknown parent {p}")));
                }
                Some(p) => children[p].push(t),
            }
        }
        let root = root.ok_or_else(|| Error::Domain("no root (parent cycle)".into()))?;
        let td = Self::assemble(bags, children, parent, root);
        if td.post_order().len() != n {
            return Err(Error::Domain("parent pointers contain a cycle".into()));
        }
        Ok(td)
    }

    /// Builds a decomposition from bags and undirected tree edges, rooted at `root`.
    pub fn from_tree_edges(bags: Vec<Vec<Vertex>>, edges: &[(NodeId, NodeId)], root: NodeId) -> Result<Self> {
        let n = bags.len();
        if n == 0 || root >= n {
            return Err(Error::Domain("root is not a node".into()));
        }
        if edges.len() + 1 != n {
            return Err(Error::Domain(format!(
                "{} tree edges for {} nodes is not a tree",
                edges.len(),
                n
            )));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::Domain(format!("bad tree edge {a}-{b}")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(t) = queue.pop_front() {
            adj[t].sort_unstable();
            for &u in &adj[t] {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = Some(t);
                    queue.push_back(u);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Domain("tree edges do not connect all nodes".into()));
        }
        Self::from_parents(bags, parent)
    }

    fn assemble(
        mut bags: Vec<Vec<Vertex>>,
        mut children: Vec<Vec<NodeId>>,
        parent: Vec<Option<NodeId>>,
        root: NodeId,
    ) -> Self {
        for bag in &mut bags {
            bag.sort_unstable();
            bag.dedup();
        }
        for c in &mut children {
            c.sort_unstable();
        }
        let spans = (0..bags.len())
            .map(|t| {
                let mut y: BTreeSet<Vertex> = bags[t].iter().copied().collect();
                for &c in &children[t] {
                    y.extend(bags[c].iter().copied());
                }
                y.into_iter().collect()
            })
            .collect();
        RootedTreeDecomposition {
            bags,
            children,
            parent,
            root,
            spans,
        }
    }

    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    /// `X_t`, ascending.
    pub fn bag(&self, t: NodeId) -> &[Vertex] {
        &self.bags[t]
    }

    pub fn children(&self, t: NodeId) -> &[NodeId] {
        &self.children[t]
    }

    pub fn parent(&self, t: NodeId) -> Option<NodeId> {
        self.parent[t]
    }

    /// `Y_t = X_t ∪ ⋃ X_{t'}` over the children `t'`.
    pub fn span(&self, t: NodeId) -> &[Vertex] {
        &self.spans[t]
    }

    /// `Z_t`, the union of bags over the subtree rooted at `t`.
    pub fn subtree_vertices(&self, t: NodeId) -> BTreeSet<Vertex> {
        let mut out = BTreeSet::new();
        let mut stack = vec![t];
        while let Some(u) = stack.pop() {
            out.extend(self.bags[u].iter().copied());
            stack.extend(self.children[u].iter().copied());
        }
        out
    }

    /// Largest bag size minus one (0 when every bag is empty).
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    /// Nodes in post-order (children before parents), computed iteratively.
    pub fn post_order(&self) -> Vec<NodeId> {
        let mut order = Vec::with_capacity(self.bags.len());
        let mut stack = vec![(self.root, false)];
        let mut visited = vec![false; self.bags.len()];
        while let Some((t, expanded)) = stack.pop() {
            if expanded {
                order.push(t);
                continue;
            }
            if std::mem::replace(&mut visited[t], true) {
                continue;
            }
            stack.push((t, true));
            for &c in self.children[t].iter().rev() {
                stack.push((c, false));
            }
        }
        order
    }

    /// Height of each node above its deepest leaf (leaves are 0).
    pub fn heights(&self) -> Vec<usize> {
        let mut h = vec![0; self.bags.len()];
        for t in self.post_order() {
            h[t] = self.children[t].iter().map(|&c| h[c] + 1).max().unwrap_or(0);
        }
        h
    }

    /// True when the root bag is empty, every node has at most two children
    /// and `|Y_t| <= |X_t| + 1` everywhere.
    pub fn is_normalized(&self) -> bool {
        self.bags[self.root].is_empty()
            && (0..self.bags.len()).all(|t| {
                self.children[t].len() <= 2 && self.spans[t].len() <= self.bags[t].len() + 1
            })
    }

    /// `G[X_t]` for every node.
    pub fn bag_graphs(&self, graph: &Graph) -> Vec<Graph> {
        self.bags
            .iter()
            .map(|bag| graph.induced_unchecked(bag.iter().copied().collect()))
            .collect()
    }

    /// Serializes to PACE `.td` for a graph with `vertex_count` vertices.
    pub fn to_td(&self, vertex_count: usize) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "s td {} {} {}",
            self.bags.len(),
            self.bags.iter().map(Vec::len).max().unwrap_or(0),
            vertex_count
        );
        for (t, bag) in self.bags.iter().enumerate() {
            let _ = write!(out, "b {}", t + 1);
            for v in bag {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        for t in 0..self.bags.len() {
            if let Some(p) = self.parent[t] {
                let _ = writeln!(out, "{} {}", p + 1, t + 1);
            }
        }
        out
    }
}

/// Parses a PACE `.td` file, roots it at bag 1 and validates it against `graph`.
pub fn parse_td(text: &str, graph: &Graph) -> Result<RootedTreeDecomposition> {
    let mut header: Option<(usize, usize)> = None;
    let mut bags: Vec<Option<Vec<Vertex>>> = Vec::new();
    let mut edges = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let num = |tok: &str| -> Result<usize> {
            tok.parse::<usize>()
                .map_err(|_| Error::parse(line_no, format!("malformed number `{tok}`")))
        };
        match tokens[0] {
            "s" => {
                if header.is_some() {
                    return Err(Error::parse(line_no, "duplicate header"));
                }
                if tokens.len() != 5 || tokens[1] != "td" {
                    return Err(Error::parse(
                        line_no,
                        "malformed header, expected `s td <bags> <width+1> <n>`",
                    ));
                }
                let count = num(tokens[2])?;
                let max_bag = num(tokens[3])?;
                let n = num(tokens[4])?;
                if n != graph.vertex_count() {
                    return Err(Error::parse(
                        line_no,
                        format!("header declares {n} vertices, graph has {}", graph.vertex_count()),
                    ));
                }
                header = Some((count, max_bag));
                bags = vec![None; count];
            }
            "b" => {
                let Some((count, max_bag)) = header else {
                    return Err(Error::parse(line_no, "bag line before `s td` header"));
                };
                if tokens.len() < 2 {
                    return Err(Error::parse(line_no, "bag line without id"));
                }
                let id = num(tokens[1])?;
                if id == 0 || id > count {
                    return Err(Error::parse(line_no, format!("bag id {id} out of range 1..={count}")));
                }
                let mut bag = Vec::new();
                for tok in &tokens[2..] {
                    let v = tok
                        .parse::<Vertex>()
                        .map_err(|_| Error::parse(line_no, format!("malformed vertex `{tok}`")))?;
                    if !graph.contains_vertex(v) {
                        return Err(Error::parse(line_no, format!("bag {id} references unknown vertex {v}")));
                    }
                    bag.push(v);
                }
                bag.sort_unstable();
                bag.dedup();
                if bag.len() > max_bag {
                    return Err(Error::parse(
                        line_no,
                        format!("bag {id} has {} vertices, header allows {max_bag}", bag.len()),
                    ));
                }
                if bags[id - 1].replace(bag).is_some() {
                    return Err(Error::parse(line_no, format!("bag {id} defined twice")));
                }
            }
            _ => {
                let Some((count, _)) = header else {
                    return Err(Error::parse(line_no, "tree edge before `s td` header"));
                };
                if tokens.len() != 2 {
                    return Err(Error::parse(line_no, "tree edge line must have two bag ids"));
                }
                let a = num(tokens[0])?;
                let b = num(tokens[1])?;
                if a == 0 || b == 0 || a > count || b > count {
                    return Err(Error::parse(line_no, format!("tree edge {a} {b} names an unknown bag")));
                }
                edges.push((a - 1, b - 1));
            }
        }
    }

    if header.is_none() {
        return Err(Error::parse(0, "missing `s td` header"));
    }
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| Error::parse(0, format!("bag {} is never defined", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    let td = RootedTreeDecomposition::from_tree_edges(bags, &edges, 0)?;
    let violations = validate(graph, &td);
    if !violations.is_empty() {
        return Err(Error::InvalidDecomposition(violations));
    }
    Ok(td)
}

/// Checks tree shape and the three decomposition axioms. Empty means valid.
pub fn validate(graph: &Graph, td: &RootedTreeDecomposition) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = td.node_count();

    if td.root >= n || td.parent[td.root].is_some() {
        out.push(Violation::Structure("root has a parent".into()));
    }
    for t in 0..n {
        if t != td.root && td.parent[t].is_none() {
            out.push(Violation::Structure(format!("node {t} has no parent")));
        }
        for &c in &td.children[t] {
            if td.parent[c] != Some(t) {
                out.push(Violation::Structure(format!("node {c} is a child of {t} but not vice versa")));
            }
        }
    }
    let order = td.post_order();
    if order.len() != n {
        out.push(Violation::Structure(format!(
            "{} of {} nodes reachable from the root",
            order.len(),
            n
        )));
    }

    for (t, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if !graph.contains_vertex(v) {
                out.push(Violation::UnknownVertex { node: t, vertex: v });
            }
        }
    }

    let mut occurrences: BTreeMap<Vertex, usize> = BTreeMap::new();
    let mut tops: BTreeMap<Vertex, usize> = BTreeMap::new();
    for t in 0..n {
        let parent_bag = td.parent[t].map(|p| &td.bags[p]);
        for &v in &td.bags[t] {
            *occurrences.entry(v).or_default() += 1;
            if parent_bag.is_none_or(|pb| pb.binary_search(&v).is_err()) {
                *tops.entry(v).or_default() += 1;
            }
        }
    }
    for &v in graph.vertices() {
        if !occurrences.contains_key(&v) {
            out.push(Violation::UncoveredVertex(v));
        } else if tops.get(&v).copied().unwrap_or(0) != 1 {
            out.push(Violation::Disconnected(v));
        }
    }

    let mut covered = BTreeSet::new();
    for bag in &td.bags {
        for (i, &u) in bag.iter().enumerate() {
            for &v in &bag[i + 1..] {
                if graph.has_edge(u, v) {
                    covered.insert((u, v));
                }
            }
        }
    }
    for &(u, v) in graph.edges() {
        if !covered.contains(&(u, v)) {
            out.push(Violation::UncoveredEdge(u, v));
        }
    }
    out
}

/// Builds a decomposition from a greedy elimination ordering.
///
/// Ties are broken by the lowest vertex id. Node `i` holds the bag created when
/// the `i`-th vertex was eliminated; the last one is the root.
pub fn heuristic_decomposition(graph: &Graph, strategy: Strategy) -> RootedTreeDecomposition {
    if graph.is_empty() {
        return RootedTreeDecomposition::assemble(vec![Vec::new()], vec![Vec::new()], vec![None], 0);
    }
    let mut adj: BTreeMap<Vertex, BTreeSet<Vertex>> = graph
        .adjacency()
        .into_iter()
        .map(|(v, ns)| (v, ns.into_iter().collect()))
        .collect();

    let score = |adj: &BTreeMap<Vertex, BTreeSet<Vertex>>, v: Vertex| -> usize {
        let ns = &adj[&v];
        match strategy {
            Strategy::MinDegree => ns.len(),
            Strategy::MinFill => {
                let list: Vec<Vertex> = ns.iter().copied().collect();
                let mut missing = 0;
                for (i, a) in list.iter().enumerate() {
                    for b in &list[i + 1..] {
                        if !adj[a].contains(b) {
                            missing += 1;
                        }
                    }
                }
                missing
            }
        }
    };

    let mut keys: BTreeMap<Vertex, usize> = adj.keys().map(|&v| (v, score(&adj, v))).collect();
    let mut queue: BTreeSet<(usize, Vertex)> = keys.iter().map(|(&v, &k)| (k, v)).collect();
    let mut order = Vec::with_capacity(adj.len());
    let mut bags = Vec::with_capacity(adj.len());

    while let Some((_, v)) = queue.pop_first() {
        keys.remove(&v);
        let neighbours = adj.remove(&v).expect("live vertex");
        for &a in &neighbours {
            let set = adj.get_mut(&a).expect("live neighbour");
            set.remove(&v);
        }
        let list: Vec<Vertex> = neighbours.iter().copied().collect();
        for (i, &a) in list.iter().enumerate() {
            for &b in &list[i + 1..] {
                adj.get_mut(&a).expect("live").insert(b);
                adj.get_mut(&b).expect("live").insert(a);
            }
        }
        let mut affected: BTreeSet<Vertex> = neighbours.clone();
        if strategy == Strategy::MinFill {
            for a in &neighbours {
                affected.extend(adj[a].iter().copied());
            }
        }
        for a in affected {
            let old = keys[&a];
            let new = score(&adj, a);
            if old != new {
                queue.remove(&(old, a));
                queue.insert((new, a));
                keys.insert(a, new);
            }
        }
        let mut bag: Vec<Vertex> = neighbours.into_iter().collect();
        bag.push(v);
        bags.push(bag);
        order.push(v);
    }

    let position: BTreeMap<Vertex, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let last = order.len() - 1;
    let parent: Vec<Option<NodeId>> = order
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if i == last {
                return None;
            }
            let next = bags[i]
                .iter()
                .filter(|&&u| u != v)
                .map(|u| position[u])
                .min();
            Some(next.unwrap_or(last))
        })
        .collect();
    let mut children = vec![Vec::new(); bags.len()];
    for (t, p) in parent.iter().enumerate() {
        if let Some(p) = *p {
            children[p].push(t);
        }
    }
    RootedTreeDecomposition::assemble(bags, children, parent, last)
}

/// Restricts every bag to `subset`, keeping the tree shape and root.
pub fn restrict(td: &RootedTreeDecomposition, subset: &BTreeSet<Vertex>) -> RootedTreeDecomposition {
    let bags = td
        .bags
        .iter()
        .map(|bag| bag.iter().copied().filter(|v| subset.contains(v)).collect())
        .collect();
    RootedTreeDecomposition::assemble(bags, td.children.clone(), td.parent.clone(), td.root)
}

/// Converts a valid decomposition to the normalized (nice, binary) form.
pub fn normalize(graph: &Graph, td: &RootedTreeDecomposition) -> Result<RootedTreeDecomposition> {
    let violations = validate(graph, td);
    if !violations.is_empty() {
        return Err(Error::InvalidDecomposition(violations));
    }
    let (bags, children, root) = contract_nested(td);

    let mut builder = NiceBuilder::default();
    // Post-order over the contracted tree.
    let mut order = Vec::new();
    let mut stack = vec![(root, false)];
    while let Some((t, expanded)) = stack.pop() {
        if expanded {
            order.push(t);
        } else {
            stack.push((t, true));
            for &c in children[&t].iter().rev() {
                stack.push((c, false));
            }
        }
    }

    let mut top: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    for t in order {
        let target = &bags[&t];
        let mut branches: Vec<NodeId> = Vec::new();
        for c in &children[&t] {
            let child_top = top.remove(c).expect("child built first");
            branches.push(builder.morph(child_top, target));
        }
        if branches.is_empty() {
            let leaf = builder.push(Vec::new(), Vec::new());
            branches.push(builder.morph(leaf, target));
        }
        let mut acc = branches[0];
        for &b in &branches[1..] {
            acc = builder.push(target.clone(), vec![acc, b]);
        }
        top.insert(t, acc);
    }
    let top = top.remove(&root).expect("root built");
    let root_node = builder.morph(top, &[]);
    Ok(builder.finish(root_node))
}

#[derive(Default)]
struct NiceBuilder {
    bags: Vec<Vec<Vertex>>,
    children: Vec<Vec<NodeId>>,
}

impl NiceBuilder {
    fn push(&mut self, bag: Vec<Vertex>, children: Vec<NodeId>) -> NodeId {
        self.bags.push(bag);
        self.children.push(children);
        self.bags.len() - 1
    }

    /// Chains forget steps then introduce steps from `from`'s bag to `target`.
    fn morph(&mut self, from: NodeId, target: &[Vertex]) -> NodeId {
        let mut current = from;
        let mut bag = self.bags[from].clone();
        let forget: Vec<Vertex> = bag.iter().copied().filter(|v| target.binary_search(v).is_err()).collect();
        for v in forget {
            bag.retain(|&u| u != v);
            current = self.push(bag.clone(), vec![current]);
        }
        for &v in target {
            if let Err(pos) = bag.binary_search(&v) {
                bag.insert(pos, v);
                current = self.push(bag.clone(), vec![current]);
            }
        }
        current
    }

    fn finish(self, root: NodeId) -> RootedTreeDecomposition {
        let mut parent = vec![None; self.bags.len()];
        for (t, cs) in self.children.iter().enumerate() {
            for &c in cs {
                parent[c] = Some(t);
            }
        }
        debug_assert!(parent[root].is_none());
        RootedTreeDecomposition::assemble(self.bags, self.children, parent, root)
    }
}

type Contracted = (
    BTreeMap<NodeId, Vec<Vertex>>,
    BTreeMap<NodeId, Vec<NodeId>>,
    NodeId,
);

/// Merges tree-adjacent nodes whose bags are nested until all neighbouring
/// bags are incomparable. The larger bag survives.
fn contract_nested(td: &RootedTreeDecomposition) -> Contracted {
    let n = td.node_count();
    let mut bags: BTreeMap<NodeId, BTreeSet<Vertex>> =
        (0..n).map(|t| (t, td.bag(t).iter().copied().collect())).collect();
    let mut adj: BTreeMap<NodeId, BTreeSet<NodeId>> = (0..n).map(|t| (t, BTreeSet::new())).collect();
    for t in 0..n {
        if let Some(p) = td.parent(t) {
            adj.get_mut(&t).unwrap().insert(p);
            adj.get_mut(&p).unwrap().insert(t);
        }
    }
    let mut root = td.root();

    let mut worklist: Vec<NodeId> = (0..n).collect();
    while let Some(u) = worklist.pop() {
        if !bags.contains_key(&u) {
            continue;
        }
        let target = adj[&u]
            .iter()
            .copied()
            .find(|v| bags[&u].is_subset(&bags[v]));
        let Some(v) = target else { continue };
        let moved: Vec<NodeId> = adj.remove(&u).unwrap().into_iter().filter(|&w| w != v).collect();
        bags.remove(&u);
        adj.get_mut(&v).unwrap().remove(&u);
        for w in moved {
            let set = adj.get_mut(&w).unwrap();
            set.remove(&u);
            set.insert(v);
            adj.get_mut(&v).unwrap().insert(w);
        }
        if root == u {
            root = v;
        }
        worklist.push(v);
        worklist.extend(adj[&v].iter().copied());
    }

    // Re-root the contracted tree.
    let mut children: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    let mut stack = vec![(root, None)];
    while let Some((t, from)) = stack.pop() {
        let cs: Vec<NodeId> = adj[&t].iter().copied().filter(|&c| Some(c) != from).collect();
        for &c in &cs {
            stack.push((c, Some(t)));
        }
        children.insert(t, cs);
    }
    let bags = bags.into_iter().map(|(t, b)| (t, b.into_iter().collect())).collect();
    (bags, children, root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_gr;

    fn p3() -> Graph {
        parse_gr("p tw 3 2\n1 2\n2 3\n").unwrap()
    }

    fn cycle(n: u32) -> Graph {
        Graph::with_vertices_1_to_n(n, (1..=n).map(|i| (i, i % n + 1))).unwrap()
    }

    fn clique(n: u32) -> Graph {
        Graph::with_vertices_1_to_n(n, (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v)))).unwrap()
    }

    #[test]
    fn parse_td_path() {
        let td = parse_td("s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n", &p3()).unwrap();
        assert_eq!(td.width(), 1);
        assert_eq!(td.root(), 0);
        assert_eq!(td.children(0), &[1]);
    }

    #[test]
    fn parse_td_uncovered_edge() {
        let err = parse_td("s td 2 2 3\nb 1 1 2\nb 2 3\n1 2\n", &p3()).unwrap_err();
        match err {
            Error::InvalidDecomposition(v) => assert!(v.contains(&Violation::UncoveredEdge(2, 3))),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_td_single_clique_bag() {
        let td = parse_td("s td 1 3 3\nb 1 1 2 3\n", &clique(3)).unwrap();
        assert_eq!(td.width(), 2);
    }

    #[test]
    fn parse_td_errors() {
        assert!(matches!(parse_td("b 1 1 2\n", &p3()), Err(Error::Parse { .. })));
        assert!(matches!(parse_td("s td 1 2 3\nb 1 1 9\n", &p3()), Err(Error::Parse { .. })));
        // Two bags, no edge: not a tree.
        assert!(matches!(parse_td("s td 2 2 3\nb 1 1 2\nb 2 2 3\n", &p3()), Err(Error::Domain(_))));
        // Three bags, edges form a cycle.
        let text = "s td 3 2 3\nb 1 1 2\nb 2 2 3\nb 3 2\n1 2\n2 3\n3 1\n";
        assert!(parse_td(text, &p3()).is_err());
    }

    #[test]
    fn validate_reports_t3_and_t1() {
        let c4 = cycle(4);
        // Path of bags {1,2} - {2,3} - {3,4} - {4,1}: vertex 1 sits at both ends.
        let td = RootedTreeDecomposition::from_tree_edges(
            vec![vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 1]],
            &[(0, 1), (1, 2), (2, 3)],
            0,
        )
        .unwrap();
        let v = validate(&c4, &td);
        assert!(v.contains(&Violation::Disconnected(1)), "{v:?}");

        let td = RootedTreeDecomposition::from_tree_edges(vec![vec![1, 2, 3]], &[], 0).unwrap();
        let v = validate(&c4, &td);
        assert!(v.contains(&Violation::UncoveredVertex(4)));
    }

    #[test]
    fn heuristic_widths() {
        let tree = Graph::with_vertices_1_to_n(6, [(1, 2), (1, 3), (3, 4), (3, 5), (5, 6)]).unwrap();
        for s in [Strategy::MinFill, Strategy::MinDegree] {
            let td = heuristic_decomposition(&tree, s);
            assert!(validate(&tree, &td).is_empty());
            assert_eq!(td.width(), 1);
            let td = heuristic_decomposition(&clique(4), s);
            assert_eq!(td.width(), 3);
            let td = heuristic_decomposition(&cycle(4), s);
            assert_eq!(td.width(), 2);
        }
    }

    #[test]
    fn heuristic_edge_cases() {
        let empty = Graph::empty();
        let td = heuristic_decomposition(&empty, Strategy::MinFill);
        assert_eq!(td.node_count(), 1);
        assert!(td.bag(0).is_empty());
        let isolated = Graph::with_vertices_1_to_n(3, []).unwrap();
        let td = heuristic_decomposition(&isolated, Strategy::MinFill);
        assert!(validate(&isolated, &td).is_empty());
        assert!((0..td.node_count()).all(|t| td.bag(t).len() == 1));
    }

    #[test]
    fn normalize_single_bag() {
        let k3 = clique(3);
        let td = RootedTreeDecomposition::from_tree_edges(vec![vec![1, 2, 3]], &[], 0).unwrap();
        let nice = normalize(&k3, &td).unwrap();
        assert!(nice.is_normalized());
        assert!(validate(&k3, &nice).is_empty());
        assert_eq!(nice.width(), 2);
        // Empty leaf, three introductions, three forgets.
        assert_eq!(nice.node_count(), 7);
    }

    #[test]
    fn normalize_three_children() {
        let star = Graph::with_vertices_1_to_n(4, [(1, 2), (1, 3), (1, 4)]).unwrap();
        let td = RootedTreeDecomposition::from_tree_edges(
            vec![vec![1], vec![1, 2], vec![1, 3], vec![1, 4]],
            &[(0, 1), (0, 2), (0, 3)],
            0,
        )
        .unwrap();
        let nice = normalize(&star, &td).unwrap();
        assert!(nice.is_normalized());
        assert!(validate(&star, &nice).is_empty());
        assert_eq!(nice.width(), 1);
        assert!((0..nice.node_count()).all(|t| nice.children(t).len() <= 2));
    }

    #[test]
    fn normalize_idempotent_on_normal_form() {
        let g = cycle(5);
        let nice = normalize(&g, &heuristic_decomposition(&g, Strategy::MinFill)).unwrap();
        let again = normalize(&g, &nice).unwrap();
        assert!(again.is_normalized());
        assert_eq!(again.width(), nice.width());
    }

    #[test]
    fn normalize_rejects_invalid() {
        let td = RootedTreeDecomposition::from_tree_edges(vec![vec![1, 2]], &[], 0).unwrap();
        assert!(matches!(normalize(&p3(), &td), Err(Error::InvalidDecomposition(_))));
    }

    #[test]
    fn restrict_cases() {
        let g = p3();
        let td = parse_td("s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n", &g).unwrap();
        let all: BTreeSet<Vertex> = g.vertices().clone();
        assert_eq!(restrict(&td, &all), td);
        let none = restrict(&td, &BTreeSet::new());
        assert!((0..none.node_count()).all(|t| none.bag(t).is_empty()));
        assert_eq!(none.children(0), td.children(0));
        let s: BTreeSet<Vertex> = [1, 3].into();
        let r = restrict(&td, &s);
        assert_eq!(r.bag(0), &[1]);
        assert_eq!(r.bag(1), &[3]);
        assert!(validate(&g.induced_subgraph(&s).unwrap(), &r).is_empty());
    }

    #[test]
    fn deep_path_does_not_overflow() {
        let n = 20_000;
        let path = Graph::with_vertices_1_to_n(n, (1..n).map(|i| (i, i + 1))).unwrap();
        let td = heuristic_decomposition(&path, Strategy::MinDegree);
        let nice = normalize(&path, &td).unwrap();
        assert!(nice.is_normalized());
        assert_eq!(nice.width(), 1);
    }

    #[test]
    fn td_round_trip() {
        let g = cycle(6);
        let td = normalize(&g, &heuristic_decomposition(&g, Strategy::MinFill)).unwrap();
        let text = td.to_td(g.vertex_count());
        let back = parse_td(&text, &g).unwrap();
        assert_eq!(back.node_count(), td.node_count());
        assert!(validate(&g, &back).is_empty());
        assert_eq!(back.width(), td.width());
    }
}
