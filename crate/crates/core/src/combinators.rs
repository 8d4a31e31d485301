//! Cores built from other cores: intersection, union, and the vertex, edge
//! and budgeted vertex partition constructions.
//!
//! Partition states are `Tuple(Assigned(m_1, P_1), ..., Assigned(m_ℓ, P_ℓ))`
//! where `P_1..P_ℓ` partition the current bag's vertices (or bag graph's
//! edges) and `m_i` is a state of the `i`-th part core running on the part's
//! subgraph. The budgeted vertex partition appends `Count(q)` with the number
//! of transversal edges handled so far. Each transversal edge is counted once,
//! at its ownership transition (see [`crate::model`]).
//!
//! The guided transitions group child states by their part assignment, extend
//! that assignment to the newly introduced elements in every possible way,
//! and query each part core once per group with the set of its child states.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::marker::PhantomData;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Vertex};
use crate::model::{
    owned_edges, DynamicCore, Element, PartitionKind, PartitionMap, Pairs, Triples, Witness,
};
use crate::state::{Part, State, StateSet};

pub type BoxedCore = Box<dyn DynamicCore>;

fn list_names(cores: &[BoxedCore]) -> String {
    cores.iter().map(|c| c.name()).collect::<Vec<_>>().join(",")
}

/// Calls `f` once per element of the cartesian product of `choices`.
fn for_each_choice<'a>(choices: &[&'a [State]], mut f: impl FnMut(&[&'a State])) {
    if choices.iter().any(|c| c.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; choices.len()];
    let mut picked: Vec<&State> = choices.iter().map(|c| &c[0]).collect();
    loop {
        f(&picked);
        let mut k = choices.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                picked[k] = &choices[k][idx[k]];
                break;
            }
            idx[k] = 0;
            picked[k] = &choices[k][0];
        }
    }
}

/// Calls `f` once per map `0..count -> 0..parts`.
fn for_each_assignment(count: usize, parts: usize, mut f: impl FnMut(&[usize])) {
    let mut digits = vec![0usize; count];
    loop {
        f(&digits);
        let mut k = count;
        loop {
            if k == 0 {
                return;
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

fn index_pairs(pairs: &Pairs) -> BTreeMap<&State, Vec<State>> {
    let mut map: BTreeMap<&State, Vec<State>> = BTreeMap::new();
    for (m, mc) in pairs {
        map.entry(mc).or_default().push(m.clone());
    }
    map
}

fn index_triples(triples: &Triples) -> BTreeMap<(&State, &State), Vec<State>> {
    let mut map: BTreeMap<(&State, &State), Vec<State>> = BTreeMap::new();
    for (m, a, b) in triples {
        map.entry((a, b)).or_default().push(m.clone());
    }
    map
}

fn tuple_of(state: &State, len: usize) -> Option<&[State]> {
    state.as_tuple().filter(|t| t.len() == len)
}

// ---------------------------------------------------------------------------
// Intersection

/// Recognizes the intersection of the classes of its cores.
#[derive(Debug)]
pub struct IntersectionCore {
    parts: Vec<BoxedCore>,
}

pub fn intersection_core(cores: Vec<BoxedCore>) -> Result<IntersectionCore> {
    if cores.is_empty() {
        return Err(Error::Config("and(...) needs at least one operand".into()));
    }
    Ok(IntersectionCore { parts: cores })
}

impl DynamicCore for IntersectionCore {
    fn name(&self) -> String {
        format!("and({})", list_names(&self.parts))
    }

    fn process_leaf(&self, bag: &Graph) -> StateSet {
        let leaves: Vec<Vec<State>> = self
            .parts
            .iter()
            .map(|c| c.process_leaf(bag).into_iter().collect())
            .collect();
        let choices: Vec<&[State]> = leaves.iter().map(Vec::as_slice).collect();
        let mut out = StateSet::new();
        for_each_choice(&choices, |picked| {
            out.insert(State::Tuple(picked.iter().map(|s| (*s).clone()).collect()));
        });
        out
    }

    fn process_one(&self, bag: &Graph, child: &Graph, child_states: &StateSet) -> Pairs {
        let l = self.parts.len();
        let tuples: Vec<(&State, &[State])> = child_states
            .iter()
            .filter_map(|s| tuple_of(s, l).map(|t| (s, t)))
            .collect();
        let pairs: Vec<Pairs> = (0..l)
            .map(|i| {
                let set: StateSet = tuples.iter().map(|(_, t)| t[i].clone()).collect();
                self.parts[i].process_one(bag, child, &set)
            })
            .collect();
        let maps: Vec<_> = pairs.iter().map(index_pairs).collect();
        let mut out = Pairs::new();
        for (s, t) in tuples {
            let choices: Option<Vec<&[State]>> =
                (0..l).map(|i| maps[i].get(&t[i]).map(Vec::as_slice)).collect();
            let Some(choices) = choices else { continue };
            for_each_choice(&choices, |picked| {
                let m = State::Tuple(picked.iter().map(|x| (*x).clone()).collect());
                out.insert((m, s.clone()));
            });
        }
        out
    }

    fn process_two(&self, bag: &Graph, left: &Graph, ls: &StateSet, right: &Graph, rs: &StateSet) -> Triples {
        let l = self.parts.len();
        let lt: Vec<(&State, &[State])> = ls.iter().filter_map(|s| tuple_of(s, l).map(|t| (s, t))).collect();
        let rt: Vec<(&State, &[State])> = rs.iter().filter_map(|s| tuple_of(s, l).map(|t| (s, t))).collect();
        let triples: Vec<Triples> = (0..l)
            .map(|i| {
                let a: StateSet = lt.iter().map(|(_, t)| t[i].clone()).collect();
                let b: StateSet = rt.iter().map(|(_, t)| t[i].clone()).collect();
                self.parts[i].process_two(bag, left, &a, right, &b)
            })
            .collect();
        let maps: Vec<_> = triples.iter().map(index_triples).collect();
        let mut out = Triples::new();
        for (sa, ta) in &lt {
            for (sb, tb) in &rt {
                let choices: Option<Vec<&[State]>> = (0..l)
                    .map(|i| maps[i].get(&(&ta[i], &tb[i])).map(Vec::as_slice))
                    .collect();
                let Some(choices) = choices else { continue };
                for_each_choice(&choices, |picked| {
                    let m = State::Tuple(picked.iter().map(|x| (*x).clone()).collect());
                    out.insert((m, (*sa).clone(), (*sb).clone()));
                });
            }
        }
        out
    }

    fn accept(&self, root: &Graph, states: &StateSet) -> StateSet {
        let l = self.parts.len();
        let accepted: Vec<StateSet> = (0..l)
            .map(|i| {
                let set: StateSet = states
                    .iter()
                    .filter_map(|s| tuple_of(s, l).map(|t| t[i].clone()))
                    .collect();
                self.parts[i].accept(root, &set)
            })
            .collect();
        states
            .iter()
            .filter(|s| tuple_of(s, l).is_some_and(|t| (0..l).all(|i| accepted[i].contains(&t[i]))))
            .cloned()
            .collect()
    }

    fn check_leaf(&self, bag: &Graph, state: &State) -> bool {
        tuple_of(state, self.parts.len())
            .is_some_and(|t| self.parts.iter().zip(t).all(|(c, m)| c.check_leaf(bag, m)))
    }

    fn check_one(&self, bag: &Graph, child: &Graph, state: &State, child_state: &State) -> bool {
        let l = self.parts.len();
        match (tuple_of(state, l), tuple_of(child_state, l)) {
            (Some(t), Some(tc)) => (0..l).all(|i| self.parts[i].check_one(bag, child, &t[i], &tc[i])),
            _ => false,
        }
    }

    fn check_two(&self, bag: &Graph, left: &Graph, right: &Graph, s: &State, a: &State, b: &State) -> bool {
        let l = self.parts.len();
        match (tuple_of(s, l), tuple_of(a, l), tuple_of(b, l)) {
            (Some(t), Some(ta), Some(tb)) => {
                (0..l).all(|i| self.parts[i].check_two(bag, left, right, &t[i], &ta[i], &tb[i]))
            }
            _ => false,
        }
    }

    fn check_accept(&self, root: &Graph, state: &State) -> bool {
        tuple_of(state, self.parts.len())
            .is_some_and(|t| self.parts.iter().zip(t).all(|(c, m)| c.check_accept(root, m)))
    }
}

// ---------------------------------------------------------------------------
// Union

/// Recognizes the union of the classes of its cores. A coordinate that is
/// `Bot` has been given up and stays `Bot` along the whole run.
#[derive(Debug)]
pub struct UnionCore {
    parts: Vec<BoxedCore>,
}

pub fn union_core(cores: Vec<BoxedCore>) -> Result<UnionCore> {
    if cores.is_empty() {
        return Err(Error::Config("or(...) needs at least one operand".into()));
    }
    Ok(UnionCore { parts: cores })
}

impl DynamicCore for UnionCore {
    fn name(&self) -> String {
        format!("or({})", list_names(&self.parts))
    }

    fn process_leaf(&self, bag: &Graph) -> StateSet {
        let leaves: Vec<Vec<State>> = self
            .parts
            .iter()
            .map(|c| {
                let mut v: Vec<State> = c.process_leaf(bag).into_iter().collect();
                v.push(State::Bot);
                v
            })
            .collect();
        let choices: Vec<&[State]> = leaves.iter().map(Vec::as_slice).collect();
        let mut out = StateSet::new();
        for_each_choice(&choices, |picked| {
            out.insert(State::Tuple(picked.iter().map(|s| (*s).clone()).collect()));
        });
        out
    }

    fn process_one(&self, bag: &Graph, child: &Graph, child_states: &StateSet) -> Pairs {
        let l = self.parts.len();
        let tuples: Vec<(&State, &[State])> = child_states
            .iter()
            .filter_map(|s| tuple_of(s, l).map(|t| (s, t)))
            .collect();
        let pairs: Vec<Pairs> = (0..l)
            .map(|i| {
                let set: StateSet = tuples
                    .iter()
                    .map(|(_, t)| &t[i])
                    .filter(|m| **m != State::Bot)
                    .cloned()
                    .collect();
                self.parts[i].process_one(bag, child, &set)
            })
            .collect();
        let maps: Vec<_> = pairs.iter().map(index_pairs).collect();
        let bot = [State::Bot];
        let mut out = Pairs::new();
        for (s, t) in tuples {
            let choices: Option<Vec<&[State]>> = (0..l)
                .map(|i| {
                    if t[i] == State::Bot {
                        Some(&bot[..])
                    } else {
                        maps[i].get(&t[i]).map(Vec::as_slice)
                    }
                })
                .collect();
            let Some(choices) = choices else { continue };
            for_each_choice(&choices, |picked| {
                let m = State::Tuple(picked.iter().map(|x| (*x).clone()).collect());
                out.insert((m, s.clone()));
            });
        }
        out
    }

    fn process_two(&self, bag: &Graph, left: &Graph, ls: &StateSet, right: &Graph, rs: &StateSet) -> Triples {
        let l = self.parts.len();
        let lt: Vec<(&State, &[State])> = ls.iter().filter_map(|s| tuple_of(s, l).map(|t| (s, t))).collect();
        let rt: Vec<(&State, &[State])> = rs.iter().filter_map(|s| tuple_of(s, l).map(|t| (s, t))).collect();
        let live = |ts: &[(&State, &[State])], i: usize| -> StateSet {
            ts.iter().map(|(_, t)| &t[i]).filter(|m| **m != State::Bot).cloned().collect()
        };
        let triples: Vec<Triples> = (0..l)
            .map(|i| self.parts[i].process_two(bag, left, &live(&lt, i), right, &live(&rt, i)))
            .collect();
        let maps: Vec<_> = triples.iter().map(index_triples).collect();
        let bot = [State::Bot];
        let mut out = Triples::new();
        for (sa, ta) in &lt {
            for (sb, tb) in &rt {
                let choices: Option<Vec<&[State]>> = (0..l)
                    .map(|i| match (&ta[i], &tb[i]) {
                        (State::Bot, State::Bot) => Some(&bot[..]),
                        (State::Bot, _) | (_, State::Bot) => None,
                        (a, b) => maps[i].get(&(a, b)).map(Vec::as_slice),
                    })
                    .collect();
                let Some(choices) = choices else { continue };
                for_each_choice(&choices, |picked| {
                    let m = State::Tuple(picked.iter().map(|x| (*x).clone()).collect());
                    out.insert((m, (*sa).clone(), (*sb).clone()));
                });
            }
        }
        out
    }

    fn accept(&self, root: &Graph, states: &StateSet) -> StateSet {
        let l = self.parts.len();
        let accepted: Vec<StateSet> = (0..l)
            .map(|i| {
                let set: StateSet = states
                    .iter()
                    .filter_map(|s| tuple_of(s, l).map(|t| t[i].clone()))
                    .filter(|m| *m != State::Bot)
                    .collect();
                self.parts[i].accept(root, &set)
            })
            .collect();
        states
            .iter()
            .filter(|s| tuple_of(s, l).is_some_and(|t| (0..l).any(|i| accepted[i].contains(&t[i]))))
            .cloned()
            .collect()
    }

    fn check_leaf(&self, bag: &Graph, state: &State) -> bool {
        tuple_of(state, self.parts.len()).is_some_and(|t| {
            self.parts
                .iter()
                .zip(t)
                .all(|(c, m)| *m == State::Bot || c.check_leaf(bag, m))
        })
    }

    fn check_one(&self, bag: &Graph, child: &Graph, state: &State, child_state: &State) -> bool {
        let l = self.parts.len();
        match (tuple_of(state, l), tuple_of(child_state, l)) {
            (Some(t), Some(tc)) => (0..l).all(|i| match (&t[i], &tc[i]) {
                (State::Bot, State::Bot) => true,
                (State::Bot, _) | (_, State::Bot) => false,
                (m, mc) => self.parts[i].check_one(bag, child, m, mc),
            }),
            _ => false,
        }
    }

    fn check_two(&self, bag: &Graph, left: &Graph, right: &Graph, s: &State, a: &State, b: &State) -> bool {
        let l = self.parts.len();
        match (tuple_of(s, l), tuple_of(a, l), tuple_of(b, l)) {
            (Some(t), Some(ta), Some(tb)) => (0..l).all(|i| match (&t[i], &ta[i], &tb[i]) {
                (State::Bot, State::Bot, State::Bot) => true,
                (State::Bot, _, _) | (_, State::Bot, _) | (_, _, State::Bot) => false,
                (m, x, y) => self.parts[i].check_two(bag, left, right, m, x, y),
            }),
            _ => false,
        }
    }

    fn check_accept(&self, root: &Graph, state: &State) -> bool {
        tuple_of(state, self.parts.len()).is_some_and(|t| {
            self.parts
                .iter()
                .zip(t)
                .any(|(c, m)| *m != State::Bot && c.check_accept(root, m))
        })
    }
}

// ---------------------------------------------------------------------------
// Partitions

/// What a partition core distributes: bag vertices or bag-graph edges.
pub trait ElementKind: Send + Sync + fmt::Debug + 'static {
    type Item: Ord + Copy + Send + Sync + fmt::Debug;
    const KIND: PartitionKind;

    fn universe(g: &Graph) -> Vec<Self::Item>;
    /// The part subgraph: induced for vertices, spanning for edges.
    fn subgraph(g: &Graph, items: &[Self::Item]) -> Graph;
    fn to_part(items: Vec<Self::Item>) -> Part;
    fn from_part(part: &Part) -> Option<&[Self::Item]>;
    /// Owned edges whose endpoints sit in different parts.
    fn crossing(owned: &[Edge], part_of: &BTreeMap<Self::Item, usize>) -> u32;
}

#[derive(Debug)]
pub struct VertexElements;

#[derive(Debug)]
pub struct EdgeElements;

impl ElementKind for VertexElements {
    type Item = Vertex;
    const KIND: PartitionKind = PartitionKind::Vertices;

    fn universe(g: &Graph) -> Vec<Vertex> {
        g.vertices().iter().copied().collect()
    }

    fn subgraph(g: &Graph, items: &[Vertex]) -> Graph {
        g.induced_unchecked(items.iter().copied().collect())
    }

    fn to_part(items: Vec<Vertex>) -> Part {
        Part::Vertices(items)
    }

    fn from_part(part: &Part) -> Option<&[Vertex]> {
        match part {
            Part::Vertices(v) => Some(v),
            Part::Edges(_) => None,
        }
    }

    fn crossing(owned: &[Edge], part_of: &BTreeMap<Vertex, usize>) -> u32 {
        owned
            .iter()
            .filter(|(u, v)| part_of.get(u) != part_of.get(v))
            .count() as u32
    }
}

impl ElementKind for EdgeElements {
    type Item = Edge;
    const KIND: PartitionKind = PartitionKind::Edges;

    fn universe(g: &Graph) -> Vec<Edge> {
        g.edges().iter().copied().collect()
    }

    fn subgraph(g: &Graph, items: &[Edge]) -> Graph {
        g.edge_subgraph_unchecked(items)
    }

    fn to_part(items: Vec<Edge>) -> Part {
        Part::Edges(items)
    }

    fn from_part(part: &Part) -> Option<&[Edge]> {
        match part {
            Part::Edges(e) => Some(e),
            Part::Vertices(_) => None,
        }
    }

    fn crossing(_owned: &[Edge], _part_of: &BTreeMap<Edge, usize>) -> u32 {
        0
    }
}

/// Partitions bag elements among `ℓ` part cores, optionally bounding the
/// number of transversal edges.
pub struct PartitionCore<E: ElementKind> {
    parts: Vec<BoxedCore>,
    budget: Option<u32>,
    _kind: PhantomData<E>,
}

pub type VertPartCore = PartitionCore<VertexElements>;
pub type EdgePartCore = PartitionCore<EdgeElements>;

impl<E: ElementKind> fmt::Debug for PartitionCore<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

pub fn vertpart_core(cores: Vec<BoxedCore>) -> Result<VertPartCore> {
    if cores.len() < 2 {
        return Err(Error::Config("vertpart(...) needs at least two parts".into()));
    }
    Ok(PartitionCore {
        parts: cores,
        budget: None,
        _kind: PhantomData,
    })
}

pub fn graphpart_core(budget: u32, cores: Vec<BoxedCore>) -> Result<VertPartCore> {
    if cores.len() < 2 {
        return Err(Error::Config("graphpart(...) needs at least two parts".into()));
    }
    Ok(PartitionCore {
        parts: cores,
        budget: Some(budget),
        _kind: PhantomData,
    })
}

pub fn edgepart_core(cores: Vec<BoxedCore>) -> Result<EdgePartCore> {
    if cores.len() < 2 {
        return Err(Error::Config("edgepart(...) needs at least two parts".into()));
    }
    Ok(PartitionCore {
        parts: cores,
        budget: None,
        _kind: PhantomData,
    })
}

struct Decoded<'s, T> {
    inner: Vec<&'s State>,
    parts: Vec<&'s [T]>,
    count: u32,
}

type Members<'s, T> = Vec<(&'s State, Decoded<'s, T>)>;

/// Child states sharing one part assignment.
struct Group<'s, T> {
    part_of: BTreeMap<T, usize>,
    graphs: Vec<Graph>,
    sets: Vec<StateSet>,
    members: Members<'s, T>,
}

impl<E: ElementKind> PartitionCore<E> {
    fn arity(&self) -> usize {
        self.parts.len()
    }

    fn crossing(&self, owned: &[Edge], part_of: &BTreeMap<E::Item, usize>) -> u32 {
        match self.budget {
            Some(_) => E::crossing(owned, part_of),
            None => 0,
        }
    }

    fn within_budget(&self, q: u32) -> bool {
        self.budget.is_none_or(|p| q <= p)
    }

    fn decode<'s>(&self, state: &'s State) -> Option<Decoded<'s, E::Item>> {
        let l = self.arity();
        let items = state.as_tuple()?;
        let expected = l + usize::from(self.budget.is_some());
        if items.len() != expected {
            return None;
        }
        let mut inner = Vec::with_capacity(l);
        let mut parts = Vec::with_capacity(l);
        for item in &items[..l] {
            let (m, part) = item.as_assigned()?;
            inner.push(m);
            parts.push(E::from_part(part)?);
        }
        let count = match self.budget {
            Some(_) => items[l].as_count()?,
            None => 0,
        };
        Some(Decoded { inner, parts, count })
    }

    fn compose(&self, picked: &[&State], parts: &[Vec<E::Item>], count: u32) -> State {
        let mut items: Vec<State> = picked
            .iter()
            .zip(parts)
            .map(|(m, p)| State::assigned((*m).clone(), E::to_part(p.clone())))
            .collect();
        if self.budget.is_some() {
            items.push(State::Count(count));
        }
        State::Tuple(items)
    }

    /// Part index per element, or `None` unless the parts partition `universe`.
    fn part_map(parts: &[&[E::Item]], universe: &[E::Item]) -> Option<BTreeMap<E::Item, usize>> {
        let mut map = BTreeMap::new();
        for (i, part) in parts.iter().enumerate() {
            for &x in *part {
                if map.insert(x, i).is_some() {
                    return None;
                }
            }
        }
        (map.len() == universe.len() && universe.iter().all(|x| map.contains_key(x))).then_some(map)
    }

    fn consistent(a: &BTreeMap<E::Item, usize>, b: &BTreeMap<E::Item, usize>) -> bool {
        let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        small.iter().all(|(x, i)| large.get(x).is_none_or(|j| i == j))
    }

    fn group<'s>(&self, g: &Graph, states: &'s StateSet) -> Vec<Group<'s, E::Item>> {
        let universe = E::universe(g);
        let mut by_parts: BTreeMap<Vec<Vec<E::Item>>, Members<'s, E::Item>> = BTreeMap::new();
        for s in states {
            let Some(d) = self.decode(s) else { continue };
            if Self::part_map(&d.parts, &universe).is_none() {
                continue;
            }
            let key: Vec<Vec<E::Item>> = d.parts.iter().map(|p| p.to_vec()).collect();
            by_parts.entry(key).or_default().push((s, d));
        }
        by_parts
            .into_iter()
            .map(|(parts, members)| {
                let refs: Vec<&[E::Item]> = parts.iter().map(Vec::as_slice).collect();
                let part_of = Self::part_map(&refs, &universe).expect("checked above");
                let graphs = parts.iter().map(|p| E::subgraph(g, p)).collect();
                let sets = (0..self.arity())
                    .map(|i| members.iter().map(|(_, d)| d.inner[i].clone()).collect())
                    .collect();
                Group {
                    part_of,
                    graphs,
                    sets,
                    members,
                }
            })
            .collect()
    }

    /// Parts of the parent bag: inherited elements that stay, plus fresh
    /// elements placed according to `ext`.
    fn parent_parts(
        &self,
        keep: &BTreeSet<E::Item>,
        inherited: &BTreeMap<E::Item, usize>,
        fresh: &[E::Item],
        ext: &[usize],
    ) -> Vec<Vec<E::Item>> {
        let mut parts = vec![Vec::new(); self.arity()];
        for (x, &i) in inherited {
            if keep.contains(x) {
                parts[i].push(*x);
            }
        }
        for (x, &i) in fresh.iter().zip(ext) {
            parts[i].push(*x);
        }
        for p in &mut parts {
            p.sort_unstable();
        }
        parts
    }

    fn subgraphs(g: &Graph, parts: &[Vec<E::Item>]) -> Vec<Graph> {
        parts.iter().map(|p| E::subgraph(g, p)).collect()
    }

    fn check_parent(&self, g: &Graph, d: &Decoded<'_, E::Item>) -> Option<BTreeMap<E::Item, usize>> {
        if !self.within_budget(d.count) {
            return None;
        }
        Self::part_map(&d.parts, &E::universe(g))
    }
}

impl<E: ElementKind> DynamicCore for PartitionCore<E> {
    fn name(&self) -> String {
        let names = list_names(&self.parts);
        match (E::KIND, self.budget) {
            (PartitionKind::Vertices, Some(p)) => format!("graphpart({p};{names})"),
            (PartitionKind::Vertices, None) => format!("vertpart({names})"),
            (PartitionKind::Edges, _) => format!("edgepart({names})"),
        }
    }

    fn partition_kind(&self) -> Option<PartitionKind> {
        Some(E::KIND)
    }

    fn process_leaf(&self, bag: &Graph) -> StateSet {
        let l = self.arity();
        let universe = E::universe(bag);
        let mut out = StateSet::new();
        for_each_assignment(universe.len(), l, |ext| {
            let parts = self.parent_parts(&BTreeSet::new(), &BTreeMap::new(), &universe, ext);
            let graphs = Self::subgraphs(bag, &parts);
            let leaves: Vec<Vec<State>> = (0..l)
                .map(|i| self.parts[i].process_leaf(&graphs[i]).into_iter().collect())
                .collect();
            let choices: Vec<&[State]> = leaves.iter().map(Vec::as_slice).collect();
            for_each_choice(&choices, |picked| {
                out.insert(self.compose(picked, &parts, 0));
            });
        });
        out
    }

    fn process_one(&self, bag: &Graph, child: &Graph, child_states: &StateSet) -> Pairs {
        let l = self.arity();
        let owned: Vec<Edge> = owned_edges(bag, child).collect();
        let keep: BTreeSet<E::Item> = E::universe(bag).into_iter().collect();
        let child_universe: BTreeSet<E::Item> = E::universe(child).into_iter().collect();
        let fresh: Vec<E::Item> = keep.iter().filter(|x| !child_universe.contains(x)).copied().collect();

        let mut out = Pairs::new();
        for group in self.group(child, child_states) {
            let crossing = self.crossing(&owned, &group.part_of);
            if group.members.iter().all(|(_, d)| !self.within_budget(d.count + crossing)) {
                continue;
            }
            for_each_assignment(fresh.len(), l, |ext| {
                let parts = self.parent_parts(&keep, &group.part_of, &fresh, ext);
                let graphs = Self::subgraphs(bag, &parts);
                let mut pairs = Vec::with_capacity(l);
                for (i, (core, g)) in self.parts.iter().zip(&graphs).enumerate() {
                    let p = core.process_one(g, &group.graphs[i], &group.sets[i]);
                    if p.is_empty() {
                        return;
                    }
                    pairs.push(p);
                }
                let maps: Vec<_> = pairs.iter().map(index_pairs).collect();
                for (s, d) in &group.members {
                    let q = d.count + crossing;
                    if !self.within_budget(q) {
                        continue;
                    }
                    let choices: Option<Vec<&[State]>> =
                        (0..l).map(|i| maps[i].get(d.inner[i]).map(Vec::as_slice)).collect();
                    let Some(choices) = choices else { continue };
                    for_each_choice(&choices, |picked| {
                        out.insert((self.compose(picked, &parts, q), (*s).clone()));
                    });
                }
            });
        }
        out
    }

    fn process_two(&self, bag: &Graph, left: &Graph, ls: &StateSet, right: &Graph, rs: &StateSet) -> Triples {
        let l = self.arity();
        let owned: Vec<Edge> = owned_edges(bag, left).chain(owned_edges(bag, right)).collect();
        let keep: BTreeSet<E::Item> = E::universe(bag).into_iter().collect();
        let seen: BTreeSet<E::Item> = E::universe(left).into_iter().chain(E::universe(right)).collect();
        let fresh: Vec<E::Item> = keep.iter().filter(|x| !seen.contains(x)).copied().collect();
        let left_groups = self.group(left, ls);
        let right_groups = self.group(right, rs);

        let mut out = Triples::new();
        for ga in &left_groups {
            for gb in &right_groups {
                if !Self::consistent(&ga.part_of, &gb.part_of) {
                    continue;
                }
                let mut combined = ga.part_of.clone();
                combined.extend(gb.part_of.iter().map(|(x, i)| (*x, *i)));
                let crossing = self.crossing(&owned, &combined);
                let min_a = ga.members.iter().map(|(_, d)| d.count).min().unwrap_or(0);
                let min_b = gb.members.iter().map(|(_, d)| d.count).min().unwrap_or(0);
                if !self.within_budget(min_a + min_b + crossing) {
                    continue;
                }
                for_each_assignment(fresh.len(), l, |ext| {
                    let parts = self.parent_parts(&keep, &combined, &fresh, ext);
                    let graphs = Self::subgraphs(bag, &parts);
                    let mut triples = Vec::with_capacity(l);
                    for (i, (core, g)) in self.parts.iter().zip(&graphs).enumerate() {
                        let t = core.process_two(
                            g,
                            &ga.graphs[i],
                            &ga.sets[i],
                            &gb.graphs[i],
                            &gb.sets[i],
                        );
                        if t.is_empty() {
                            return;
                        }
                        triples.push(t);
                    }
                    let maps: Vec<_> = triples.iter().map(index_triples).collect();
                    for (sa, da) in &ga.members {
                        for (sb, db) in &gb.members {
                            let q = da.count + db.count + crossing;
                            if !self.within_budget(q) {
                                continue;
                            }
                            let choices: Option<Vec<&[State]>> = (0..l)
                                .map(|i| maps[i].get(&(da.inner[i], db.inner[i])).map(Vec::as_slice))
                                .collect();
                            let Some(choices) = choices else { continue };
                            for_each_choice(&choices, |picked| {
                                out.insert((self.compose(picked, &parts, q), (*sa).clone(), (*sb).clone()));
                            });
                        }
                    }
                });
            }
        }
        out
    }

    fn accept(&self, root: &Graph, states: &StateSet) -> StateSet {
        states
            .iter()
            .filter(|s| {
                let Some(d) = self.decode(s) else { return false };
                if self.check_parent(root, &d).is_none() {
                    return false;
                }
                (0..self.arity()).all(|i| {
                    let g = E::subgraph(root, d.parts[i]);
                    let set = StateSet::from([d.inner[i].clone()]);
                    !self.parts[i].accept(&g, &set).is_empty()
                })
            })
            .cloned()
            .collect()
    }

    fn check_leaf(&self, bag: &Graph, state: &State) -> bool {
        let Some(d) = self.decode(state) else { return false };
        d.count == 0
            && self.check_parent(bag, &d).is_some()
            && (0..self.arity()).all(|i| self.parts[i].check_leaf(&E::subgraph(bag, d.parts[i]), d.inner[i]))
    }

    fn check_one(&self, bag: &Graph, child: &Graph, state: &State, child_state: &State) -> bool {
        let (Some(d), Some(dc)) = (self.decode(state), self.decode(child_state)) else {
            return false;
        };
        let Some(map) = self.check_parent(bag, &d) else { return false };
        let Some(child_map) = Self::part_map(&dc.parts, &E::universe(child)) else {
            return false;
        };
        if !Self::consistent(&map, &child_map) {
            return false;
        }
        let owned: Vec<Edge> = owned_edges(bag, child).collect();
        if d.count != dc.count + self.crossing(&owned, &child_map) {
            return false;
        }
        (0..self.arity()).all(|i| {
            self.parts[i].check_one(
                &E::subgraph(bag, d.parts[i]),
                &E::subgraph(child, dc.parts[i]),
                d.inner[i],
                dc.inner[i],
            )
        })
    }

    fn check_two(&self, bag: &Graph, left: &Graph, right: &Graph, s: &State, a: &State, b: &State) -> bool {
        let (Some(d), Some(da), Some(db)) = (self.decode(s), self.decode(a), self.decode(b)) else {
            return false;
        };
        let Some(map) = self.check_parent(bag, &d) else { return false };
        let (Some(ma), Some(mb)) = (
            Self::part_map(&da.parts, &E::universe(left)),
            Self::part_map(&db.parts, &E::universe(right)),
        ) else {
            return false;
        };
        if !Self::consistent(&map, &ma) || !Self::consistent(&map, &mb) || !Self::consistent(&ma, &mb) {
            return false;
        }
        let mut combined = ma.clone();
        combined.extend(mb.iter().map(|(x, i)| (*x, *i)));
        let owned: Vec<Edge> = owned_edges(bag, left).chain(owned_edges(bag, right)).collect();
        if d.count != da.count + db.count + self.crossing(&owned, &combined) {
            return false;
        }
        (0..self.arity()).all(|i| {
            self.parts[i].check_two(
                &E::subgraph(bag, d.parts[i]),
                &E::subgraph(left, da.parts[i]),
                &E::subgraph(right, db.parts[i]),
                d.inner[i],
                da.inner[i],
                db.inner[i],
            )
        })
    }

    fn check_accept(&self, root: &Graph, state: &State) -> bool {
        let Some(d) = self.decode(state) else { return false };
        self.check_parent(root, &d).is_some()
            && (0..self.arity()).all(|i| self.parts[i].check_accept(&E::subgraph(root, d.parts[i]), d.inner[i]))
    }
}

/// Unions the per-node part assignments of a partition-core witness.
///
/// Fails when a node state is not a partition state or when two nodes place
/// the same element in different parts.
pub fn extract_partition(witness: &Witness) -> Result<PartitionMap> {
    let mut out = PartitionMap::new();
    for (node, state) in &witness.assignment {
        let items = state
            .as_tuple()
            .ok_or_else(|| Error::Witness(format!("node {node}: not a partition state")))?;
        let parts: Vec<&Part> = items
            .iter()
            .take_while(|s| s.as_assigned().is_some())
            .map(|s| s.as_assigned().expect("checked").1)
            .collect();
        let rest = &items[parts.len()..];
        let trailing_ok = matches!(rest, [] | [State::Count(_)]);
        if parts.len() < 2 || !trailing_ok {
            return Err(Error::Witness(format!("node {node}: not a partition state")));
        }
        for (i, part) in parts.iter().enumerate() {
            let elements: Vec<Element> = match part {
                Part::Vertices(vs) => vs.iter().map(|&v| Element::Vertex(v)).collect(),
                Part::Edges(es) => es.iter().map(|&(u, v)| Element::Edge(u, v)).collect(),
            };
            for x in elements {
                if let Some(prev) = out.insert(x, i + 1) {
                    if prev != i + 1 {
                        return Err(Error::Witness(format!(
                            "node {node}: {x:?} assigned to parts {prev} and {}",
                            i + 1
                        )));
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{any_core, bounded_size_core, edgeless_core, forest_core, tree_core};
    use crate::decomp::{heuristic_decomposition, Strategy};
    use crate::model::{check_witness, run};

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

    fn p3() -> Graph {
        graph(3, &[(1, 2), (2, 3)])
    }

    fn two_triangles() -> Graph {
        graph(6, &[(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6)])
    }

    fn decide(core: &dyn DynamicCore, g: &Graph) -> bool {
        let td = heuristic_decomposition(g, Strategy::MinFill);
        let verdict = run(core, g, &td, true).unwrap();
        if let Some(w) = &verdict.witness {
            assert!(check_witness(core, g, &verdict.decomposition, w).unwrap());
        }
        assert_eq!(verdict.answer, verdict.witness.is_some());
        verdict.answer
    }

    fn b<C: DynamicCore + 'static>(c: C) -> BoxedCore {
        Box::new(c)
    }

    fn edgeless_x(n: usize) -> Vec<BoxedCore> {
        (0..n).map(|_| b(edgeless_core())).collect()
    }

    #[test]
    fn arity_errors() {
        assert!(matches!(intersection_core(vec![]), Err(Error::Config(_))));
        assert!(matches!(union_core(vec![]), Err(Error::Config(_))));
        assert!(matches!(vertpart_core(edgeless_x(1)), Err(Error::Config(_))));
        assert!(matches!(edgepart_core(edgeless_x(1)), Err(Error::Config(_))));
        assert!(matches!(graphpart_core(3, edgeless_x(1)), Err(Error::Config(_))));
    }

    #[test]
    fn intersection_examples() {
        let and = intersection_core(vec![b(forest_core()), b(bounded_size_core(3))]).unwrap();
        assert!(decide(&and, &p3()));
        assert!(!decide(&and, &k(3)));
    }

    #[test]
    fn union_examples() {
        let or = union_core(vec![b(edgeless_core()), b(tree_core())]).unwrap();
        assert!(decide(&or, &p3()));
        assert!(!decide(&or, &k(3)));
        assert!(decide(&or, &graph(3, &[])));
    }

    #[test]
    fn vertpart_examples() {
        let three = vertpart_core(edgeless_x(3)).unwrap();
        assert!(decide(&three, &k(3)));
        assert!(!decide(&three, &k(4)));
        let two = vertpart_core(edgeless_x(2)).unwrap();
        assert!(!decide(&two, &c(5)));
        let trees = vertpart_core(vec![b(tree_core()), b(tree_core())]).unwrap();
        assert!(decide(&trees, &c(4)));
        assert!(!decide(&trees, &two_triangles()));
        assert!(decide(&trees, &p3()));
        // An empty part is not a tree.
        assert!(!decide(&trees, &graph(1, &[])));
    }

    #[test]
    fn edgepart_examples() {
        let forests = edgepart_core(vec![b(forest_core()), b(forest_core())]).unwrap();
        assert!(decide(&forests, &k(4)));
        assert!(!decide(&forests, &k(5)));
        let trees = edgepart_core(vec![b(tree_core()), b(tree_core())]).unwrap();
        assert!(!decide(&trees, &c(4)));
        assert!(decide(&trees, &k(4)));
    }

    #[test]
    fn graphpart_examples() {
        assert!(decide(&graphpart_core(2, edgeless_x(2)).unwrap(), &p3()));
        assert!(!decide(&graphpart_core(1, edgeless_x(2)).unwrap(), &p3()));
        assert!(!decide(&graphpart_core(99, edgeless_x(2)).unwrap(), &k(3)));
        let anys = || vec![b(any_core()), b(any_core())];
        for g in [k(4), c(5), Graph::empty(), two_triangles()] {
            assert!(decide(&graphpart_core(0, anys()).unwrap(), &g));
        }
    }

    #[test]
    fn extract_partition_on_p2() {
        let core = vertpart_core(edgeless_x(2)).unwrap();
        let g = graph(2, &[(1, 2)]);
        let td = heuristic_decomposition(&g, Strategy::MinFill);
        let verdict = run(&core, &g, &td, true).unwrap();
        let map = verdict.witness.unwrap().derived_partition.unwrap();
        let a = map[&Element::Vertex(1)];
        let bb = map[&Element::Vertex(2)];
        assert_eq!(map.len(), 2);
        assert!((a, bb) == (1, 2) || (a, bb) == (2, 1));
    }

    #[test]
    fn extract_partition_rejects_non_partition() {
        let core = forest_core();
        let g = p3();
        let td = heuristic_decomposition(&g, Strategy::MinFill);
        let verdict = run(&core, &g, &td, true).unwrap();
        assert!(verdict.witness.as_ref().unwrap().derived_partition.is_none());
        assert!(matches!(
            extract_partition(verdict.witness.as_ref().unwrap()),
            Err(Error::Witness(_))
        ));
    }

    #[test]
    fn corrupted_root_state_fails_check() {
        let core = vertpart_core(vec![b(tree_core()), b(tree_core())]).unwrap();
        let g = c(4);
        let td = heuristic_decomposition(&g, Strategy::MinFill);
        let verdict = run(&core, &g, &td, true).unwrap();
        let mut w = verdict.witness.unwrap();
        let root = verdict.decomposition.root();
        w.assignment.insert(root, State::Top);
        assert!(!check_witness(&core, &g, &verdict.decomposition, &w).unwrap());
        w.assignment.remove(&root);
        assert!(check_witness(&core, &g, &verdict.decomposition, &w).is_err());
    }
}
