//! Simple undirected graphs with stable vertex ids, PACE `.gr` ingestion and
//! the vertex- and edge-induced subgraph operators used by the cores.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Vertex identifier. Ids are kept exactly as they appear in the input.
pub type Vertex = u32;

/// An undirected edge stored as `(min, max)`.
pub type Edge = (Vertex, Vertex);

/// Returns the canonical `(min, max)` form of an edge.
#[inline]
pub fn edge(u: Vertex, v: Vertex) -> Edge {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// A finite simple undirected graph.
///
/// Vertices and edges are kept in ordered sets so that every iteration is
/// ascending and therefore deterministic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graph {
    vertices: BTreeSet<Vertex>,
    edges: BTreeSet<Edge>,
}

/// Side information collected while reading a `.gr` file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GrReport {
    /// Edge count declared in the `p tw` header.
    pub declared_edges: usize,
    /// Edge lines that repeated an edge already seen.
    pub duplicate_edges: usize,
}

impl Graph {
    /// The graph with no vertices.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a graph from a vertex list and an edge list.
    ///
    /// Duplicate edges (in either orientation) are merged.
    pub fn new(
        vertices: impl IntoIterator<Item = Vertex>,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<Self> {
        let vertices: BTreeSet<Vertex> = vertices.into_iter().collect();
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::Domain(format!("self-loop on vertex {u}")));
            }
            if !vertices.contains(&u) || !vertices.contains(&v) {
                return Err(Error::Domain(format!(
                    "edge {u}-{v} has an endpoint outside the vertex set"
                )));
            }
            set.insert(edge(u, v));
        }
        Ok(Graph {
            vertices,
            edges: set,
        })
    }

    /// Builds a graph on the vertices touched by `edges` plus `1..=n`.
    pub fn with_vertices_1_to_n(n: u32, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        Self::new(1..=n, edges)
    }

    pub fn vertices(&self) -> &BTreeSet<Vertex> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edges.contains(&edge(u, v))
    }

    /// Adjacency lists, ascending.
    pub fn adjacency(&self) -> BTreeMap<Vertex, Vec<Vertex>> {
        let mut adj: BTreeMap<Vertex, Vec<Vertex>> =
            self.vertices.iter().map(|&v| (v, Vec::new())).collect();
        for &(u, v) in &self.edges {
            adj.get_mut(&u).expect("endpoint").push(v);
            adj.get_mut(&v).expect("endpoint").push(u);
        }
        for list in adj.values_mut() {
            list.sort_unstable();
        }
        adj
    }

    /// `G[S]` for a vertex set `S ⊆ V(G)`.
    pub fn induced_subgraph<'a>(&self, subset: impl IntoIterator<Item = &'a Vertex>) -> Result<Graph> {
        let subset: BTreeSet<Vertex> = subset.into_iter().copied().collect();
        if let Some(v) = subset.iter().find(|v| !self.vertices.contains(v)) {
            return Err(Error::Domain(format!("vertex {v} is not in the graph")));
        }
        Ok(self.induced_unchecked(subset))
    }

    /// `G[S]` where the caller guarantees `S ⊆ V(G)`.
    pub(crate) fn induced_unchecked(&self, subset: BTreeSet<Vertex>) -> Graph {
        let mut edges = BTreeSet::new();
        let k = subset.len();
        if k * k < 4 * self.edges.len() {
            let list: Vec<Vertex> = subset.iter().copied().collect();
            for (i, &u) in list.iter().enumerate() {
                for &v in &list[i + 1..] {
                    if self.edges.contains(&(u, v)) {
                        edges.insert((u, v));
                    }
                }
            }
        } else {
            edges.extend(
                self.edges
                    .iter()
                    .filter(|(u, v)| subset.contains(u) && subset.contains(v))
                    .copied(),
            );
        }
        Graph {
            vertices: subset,
            edges,
        }
    }

    /// `G[F] = (V(G), F)` for an edge set `F ⊆ E(G)`. All vertices are kept.
    pub fn edge_subgraph<'a>(&self, subset: impl IntoIterator<Item = &'a Edge>) -> Result<Graph> {
        let mut edges = BTreeSet::new();
        for &(u, v) in subset {
            let e = edge(u, v);
            if !self.edges.contains(&e) {
                return Err(Error::Domain(format!("edge {u}-{v} is not in the graph")));
            }
            edges.insert(e);
        }
        Ok(Graph {
            vertices: self.vertices.clone(),
            edges,
        })
    }

    /// `(V(G), F)` where the caller guarantees `F ⊆ E(G)` in canonical form.
    pub(crate) fn edge_subgraph_unchecked(&self, subset: &[Edge]) -> Graph {
        Graph {
            vertices: self.vertices.clone(),
            edges: subset.iter().copied().collect(),
        }
    }

    /// Edges with one endpoint in `s1` and the other in `s2`, each listed once.
    pub fn edges_between(&self, s1: &BTreeSet<Vertex>, s2: &BTreeSet<Vertex>) -> Result<BTreeSet<Edge>> {
        for v in s1.iter().chain(s2) {
            if !self.vertices.contains(v) {
                return Err(Error::Domain(format!("vertex {v} is not in the graph")));
            }
        }
        Ok(self
            .edges
            .iter()
            .filter(|&&(u, v)| {
                (s1.contains(&u) && s2.contains(&v)) || (s2.contains(&u) && s1.contains(&v))
            })
            .copied()
            .collect())
    }

    /// Serializes to PACE `.gr`. Vertices must be exactly `1..=n`.
    pub fn to_gr(&self) -> Result<String> {
        let n = self.vertices.len() as u32;
        if self.vertices.iter().copied().ne(1..=n) {
            return Err(Error::Domain(
                "PACE .gr output requires vertex ids 1..n".to_string(),
            ));
        }
        let mut out = String::new();
        let _ = writeln!(out, "p tw {} {}", n, self.edges.len());
        for (u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        Ok(out)
    }
}

/// Parses a PACE `.gr` file.
pub fn parse_gr(text: &str) -> Result<Graph> {
    parse_gr_with_report(text).map(|(g, _)| g)
}

/// Parses a PACE `.gr` file and reports duplicate edge lines.
pub fn parse_gr_with_report(text: &str) -> Result<(Graph, GrReport)> {
    let mut header: Option<(u32, usize)> = None;
    let mut edges = BTreeSet::new();
    let mut report = GrReport::default();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens[0] == "p" {
            if header.is_some() {
                return Err(Error::parse(line_no, "duplicate header"));
            }
            if tokens.len() != 4 || tokens[1] != "tw" {
                return Err(Error::parse(line_no, "malformed header, expected `p tw <n> <m>`"));
            }
            let n = tokens[2]
                .parse::<u32>()
                .map_err(|_| Error::parse(line_no, "malformed vertex count"))?;
            let m = tokens[3]
                .parse::<usize>()
                .map_err(|_| Error::parse(line_no, "malformed edge count"))?;
            header = Some((n, m));
            report.declared_edges = m;
            continue;
        }
        let Some((n, _)) = header else {
            return Err(Error::parse(line_no, "edge line before `p tw` header"));
        };
        if tokens.len() != 2 {
            return Err(Error::parse(line_no, "edge line must have two endpoints"));
        }
        let parse_endpoint = |tok: &str| -> Result<Vertex> {
            let v = tok
                .parse::<u32>()
                .map_err(|_| Error::parse(line_no, format!("malformed endpoint `{tok}`")))?;
            if v == 0 || v > n {
                return Err(Error::parse(line_no, format!("endpoint {v} out of range 1..={n}")));
            }
            Ok(v)
        };
        let u = parse_endpoint(tokens[0])?;
        let v = parse_endpoint(tokens[1])?;
        if u == v {
            return Err(Error::parse(line_no, format!("self-loop on vertex {u}")));
        }
        if !edges.insert(edge(u, v)) {
            report.duplicate_edges += 1;
        }
    }

    let Some((n, _)) = header else {
        return Err(Error::parse(0, "missing `p tw` header"));
    };
    Ok((
        Graph {
            vertices: (1..=n).collect(),
            edges,
        },
        report,
    ))
}
