//! Graphs as single-sorted relational models, plus the two structural
//! predicates (tree, connected) used to show what automorphic equivalence
//! does not preserve.
//!
//! Undirected graphs are stored symmetrically closed: both orientations of
//! every edge are present as tuples. Both predicates work on the underlying
//! undirected, loop-free graph, so they apply to directed graphs as well.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{Algebra, Element, Interpretation, Model, RelationSymbol, SortedDomain};

/// Sort, relation and interpretation names used when a graph is expanded
/// into a model.
pub const GRAPH_SORT: &str = "V";
pub const GRAPH_RELATION: &str = "edge";
pub const GRAPH_INTERPRETATION: &str = "E";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    directed: bool,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn directed(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        Self::build(vertex_count, edges, true)
    }

    /// Stores both orientations of every edge.
    pub fn undirected(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        Self::build(vertex_count, edges, false)
    }

    fn build(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        directed: bool,
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::Precondition("a graph needs at least one vertex".into()));
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::Precondition(format!(
                    "edge ({u}, {v}) endpoint out of range for {vertex_count} vertices"
                )));
            }
            set.insert((u, v));
            if !directed {
                set.insert((v, u));
            }
        }
        Ok(Self { vertex_count, directed, edges: set })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    fn is_symmetric(&self) -> bool {
        self.edges.iter().all(|&(u, v)| self.edges.contains(&(v, u)))
    }

    /// Adjacency of the underlying undirected, loop-free graph.
    fn underlying_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(u, v) in &self.edges {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        adj
    }

    /// Number of undirected, loop-free edges.
    fn underlying_edge_count(&self) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| u != v)
            .map(|&(u, v)| if u <= v { (u, v) } else { (v, u) })
            .collect::<BTreeSet<_>>()
            .len()
    }
}

/// The model of a graph: one sort of vertices, no operations, one binary
/// edge relation interpreted by the edge set.
pub fn graph_to_model(g: &Graph) -> Model {
    let domain = SortedDomain::single(GRAPH_SORT, g.vertex_count);
    let tuples: Vec<Vec<Element>> = g
        .edges
        .iter()
        .map(|&(u, v)| vec![Element::new(0, u), Element::new(0, v)])
        .collect();
    Model::new(
        Algebra::new(domain, vec![]),
        vec![RelationSymbol::new(GRAPH_RELATION, vec![0, 0])],
        Interpretation::new(GRAPH_INTERPRETATION).with_relation(GRAPH_RELATION, tuples),
    )
}

/// Inverse of [`graph_to_model`] for models of the right shape: one sort, no
/// operations, exactly one binary relation. A symmetric tuple set comes back
/// as an undirected graph.
pub fn model_to_graph(m: &Model) -> Result<Graph> {
    if m.domain().sort_count() != 1 {
        return Err(Error::Precondition("graph models have exactly one sort".into()));
    }
    if !m.algebra.operations.is_empty() {
        return Err(Error::Precondition("graph models have no operations".into()));
    }
    let [rel] = m.relations.as_slice() else {
        return Err(Error::Precondition(format!(
            "graph models have exactly one relation, found {}",
            m.relations.len()
        )));
    };
    if rel.signature != [0, 0] {
        return Err(Error::Precondition(format!(
            "relation {:?} is not binary over the vertex sort",
            rel.name
        )));
    }
    let edges: Vec<(usize, usize)> = m
        .interpretation
        .relation_tuples(&rel.name)
        .iter()
        .map(|t| (t[0].index, t[1].index))
        .collect();
    let directed = Graph::directed(m.domain().sorts()[0].size, edges)?;
    if directed.is_symmetric() {
        Ok(Graph { directed: false, ..directed })
    } else {
        Ok(directed)
    }
}

/// True when the underlying undirected, loop-free graph has one component.
pub fn is_connected(g: &Graph) -> bool {
    let adj = g.underlying_adjacency();
    let mut seen = vec![false; g.vertex_count];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == g.vertex_count
}

/// True when the underlying undirected, loop-free graph is connected and
/// acyclic (edge count is one less than the vertex count).
pub fn is_tree(g: &Graph) -> bool {
    is_connected(g) && g.underlying_edge_count() == g.vertex_count - 1
}
