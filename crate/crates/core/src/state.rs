//! Per-node DP states as canonical structured terms.
//!
//! Two states are equal iff their canonical serializations are equal. All
//! constructors canonicalize (sorted sets, blocks ordered by minimum element),
//! so the derived `Ord` gives a deterministic iteration order for
//! [`StateSet`].

use std::collections::BTreeSet;
use std::fmt;

use crate::graph::{Edge, Vertex};

/// A partition of a vertex set into disjoint nonempty blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockPartition(Vec<Vec<Vertex>>);

impl BlockPartition {
    /// Sorts every block, drops empty ones and orders blocks by minimum.
    pub fn new(blocks: impl IntoIterator<Item = Vec<Vertex>>) -> Self {
        let mut blocks: Vec<Vec<Vertex>> = blocks
            .into_iter()
            .filter(|b| !b.is_empty())
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        blocks.sort_unstable();
        BlockPartition(blocks)
    }

    pub fn blocks(&self) -> &[Vec<Vertex>] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All vertices covered, ascending.
    pub fn vertices(&self) -> BTreeSet<Vertex> {
        self.0.iter().flatten().copied().collect()
    }

    /// True when the blocks are pairwise disjoint and cover exactly `universe`.
    pub fn partitions(&self, universe: &BTreeSet<Vertex>) -> bool {
        let total: usize = self.0.iter().map(Vec::len).sum();
        total == universe.len() && self.vertices() == *universe
    }
}

/// The vertex or edge set attached to a coordinate of a partition state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Part {
    Vertices(Vec<Vertex>),
    Edges(Vec<Edge>),
}

impl Part {
    pub fn vertices(vs: impl IntoIterator<Item = Vertex>) -> Self {
        let mut v: Vec<Vertex> = vs.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Part::Vertices(v)
    }

    pub fn edges(es: impl IntoIterator<Item = Edge>) -> Self {
        let mut v: Vec<Edge> = es.into_iter().map(|(a, b)| crate::graph::edge(a, b)).collect();
        v.sort_unstable();
        v.dedup();
        Part::Edges(v)
    }

    pub fn len(&self) -> usize {
        match self {
            Part::Vertices(v) => v.len(),
            Part::Edges(e) => e.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum State {
    /// The single letter of the trivial cores.
    Top,
    /// A coordinate of a union state that has been given up.
    Bot,
    Count(u32),
    /// Connectivity of the processed part projected onto the bag, plus the
    /// number of components already forgotten entirely.
    Blocks { partition: BlockPartition, closed: u32 },
    Tuple(Vec<State>),
    Assigned(Box<State>, Part),
}

impl State {
    pub fn blocks(blocks: impl IntoIterator<Item = Vec<Vertex>>, closed: u32) -> Self {
        State::Blocks {
            partition: BlockPartition::new(blocks),
            closed,
        }
    }

    pub fn assigned(inner: State, part: Part) -> Self {
        State::Assigned(Box::new(inner), part)
    }

    pub fn as_tuple(&self) -> Option<&[State]> {
        match self {
            State::Tuple(items) => Some(items),
            _ => None,
        }
    }

    pub fn as_assigned(&self) -> Option<(&State, &Part)> {
        match self {
            State::Assigned(inner, part) => Some((inner, part)),
            _ => None,
        }
    }

    pub fn as_count(&self) -> Option<u32> {
        match self {
            State::Count(q) => Some(*q),
            _ => None,
        }
    }
}

/// Deduplicated, ordered set of states.
pub type StateSet = BTreeSet<State>;

fn write_set<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    f.write_str("{")?;
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str("}")
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Part::Vertices(vs) => write_set(f, vs),
            Part::Edges(es) => {
                let labels: Vec<String> = es.iter().map(|(u, v)| format!("{u}-{v}")).collect();
                write_set(f, &labels)
            }
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            State::Top => f.write_str("T"),
            State::Bot => f.write_str("_"),
            State::Count(q) => write!(f, "{q}"),
            State::Blocks { partition, closed } => {
                f.write_str("[")?;
                for (i, b) in partition.blocks().iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write_set(f, b)?;
                }
                write!(f, "|{closed}]")
            }
            State::Tuple(items) => {
                f.write_str("(")?;
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
            State::Assigned(inner, part) => write!(f, "({inner},{part})"),
        }
    }
}
