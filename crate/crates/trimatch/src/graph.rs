//! Canonical 3-uniform hypergraph representation: vertices `0..n`, edges as
//! sorted triples, plus disjoint tuple systems (matchings and padded
//! fixed-size systems) and the plain-text file format.
//!
//! Values are immutable after construction and safe to share across threads;
//! all mutation happens through constructors.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Vertex id; always `< n` for the graph it belongs to.
pub type Vertex = usize;

/// Set of vertex ids. Ordered so that iteration and serialization are
/// deterministic.
pub type VertexSet = BTreeSet<Vertex>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} out of range for graph on {1} vertices")]
    VertexOutOfRange(Vertex, usize),
    #[error("edge {0:?} repeats a vertex")]
    DuplicateVertexInEdge([Vertex; 3]),
    #[error("duplicate edge {0}")]
    DuplicateEdge(Triple),
    #[error("tuples {0} and {1} overlap")]
    OverlappingTuples(Triple, Triple),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("malformed edge line {line}: {reason}")]
    MalformedEdgeLine { line: usize, reason: String },
    #[error("header announced {expected} edges, found {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
}

/// An unordered triple of distinct vertices, stored sorted ascending.
/// `Ord` therefore gives the canonical lexicographic edge order.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple([Vertex; 3]);

impl Triple {
    pub fn new(a: Vertex, b: Vertex, c: Vertex) -> Result<Self, GraphError> {
        if a == b || a == c || b == c {
            return Err(GraphError::DuplicateVertexInEdge([a, b, c]));
        }
        let mut v = [a, b, c];
        v.sort_unstable();
        Ok(Triple(v))
    }

    /// Vertices in ascending order.
    pub fn vertices(&self) -> [Vertex; 3] {
        self.0
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.contains(&v)
    }

    pub fn is_disjoint(&self, other: &Triple) -> bool {
        self.0.iter().all(|v| !other.contains(*v))
    }

    pub fn max_vertex(&self) -> Vertex {
        self.0[2]
    }
}

impl fmt::Debug for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{},{}}}", self.0[0], self.0[1], self.0[2])
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.0[0], self.0[1], self.0[2])
    }
}

/// A 3-graph: vertex count plus a canonical (sorted, duplicate-free) edge set.
#[derive(Clone, Debug)]
pub struct ThreeGraph {
    n: usize,
    edges: Vec<Triple>,
    edge_set: HashSet<Triple>,
    incident: Vec<Vec<usize>>,
}

impl ThreeGraph {
    /// Builds a graph from any iterator of triples. Edges are canonicalized
    /// and must be distinct; every vertex must be `< n`.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = Triple>,
    {
        let mut list: Vec<Triple> = Vec::new();
        let mut set: HashSet<Triple> = HashSet::new();
        for e in edges {
            if e.max_vertex() >= n {
                return Err(GraphError::VertexOutOfRange(e.max_vertex(), n));
            }
            if !set.insert(e) {
                return Err(GraphError::DuplicateEdge(e));
            }
            list.push(e);
        }
        list.sort_unstable();
        let mut incident = vec![Vec::new(); n];
        for (i, e) in list.iter().enumerate() {
            for v in e.vertices() {
                incident[v].push(i);
            }
        }
        Ok(ThreeGraph { n, edges: list, edge_set: set, incident })
    }

    /// Builds a graph from raw vertex triples, canonicalizing each.
    pub fn from_raw_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = [Vertex; 3]>,
    {
        let triples = edges
            .into_iter()
            .map(|[a, b, c]| Triple::new(a, b, c))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(n, triples)
    }

    /// Complete 3-graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    edges.push(Triple([a, b, c]));
                }
            }
        }
        ThreeGraph::new(n, edges).expect("complete graph is always valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical lexicographic order.
    pub fn edges(&self) -> &[Triple] {
        &self.edges
    }

    pub fn has_edge(&self, e: &Triple) -> bool {
        self.edge_set.contains(e)
    }

    /// Membership query by raw vertices; order-insensitive.
    /// Returns false (rather than erroring) when the vertices repeat.
    pub fn has_triple(&self, a: Vertex, b: Vertex, c: Vertex) -> bool {
        match Triple::new(a, b, c) {
            Ok(t) => self.edge_set.contains(&t),
            Err(_) => false,
        }
    }

    /// Indices (into `edges()`) of the edges containing `v`.
    pub fn incident_edges(&self, v: Vertex) -> &[usize] {
        assert!(v < self.n, "vertex {} out of range for n={}", v, self.n);
        &self.incident[v]
    }

    /// Number of edges containing `v`. Panics if `v >= n`.
    pub fn degree(&self, v: Vertex) -> usize {
        assert!(v < self.n, "vertex {} out of range for n={}", v, self.n);
        self.incident[v].len()
    }

    /// Induced subgraph on `keep`, relabelled to `0..keep.len()`.
    /// Returns the subgraph together with the new-id -> old-id table.
    pub fn induced(&self, keep: &VertexSet) -> (ThreeGraph, Vec<Vertex>) {
        let old_of_new: Vec<Vertex> = keep.iter().copied().collect();
        let mut new_of_old = vec![usize::MAX; self.n];
        for (new, &old) in old_of_new.iter().enumerate() {
            new_of_old[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| e.vertices().iter().all(|v| keep.contains(v)))
            .map(|e| {
                let [a, b, c] = e.vertices();
                Triple([new_of_old[a], new_of_old[b], new_of_old[c]])
            })
            .collect::<Vec<_>>();
        let g = ThreeGraph::new(old_of_new.len(), edges).expect("induced edges stay valid");
        (g, old_of_new)
    }

    /// Parses the plain-text format: header `n m`, then `m` lines `a b c`.
    /// Blank lines and lines starting with `#` are ignored. Edge lines may
    /// list vertices in any order; duplicates are rejected.
    pub fn from_text(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines
            .next()
            .ok_or_else(|| GraphError::MalformedHeader("empty input".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| GraphError::MalformedHeader(header.into()))?;
        let m: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| GraphError::MalformedHeader(header.into()))?;
        if it.next().is_some() {
            return Err(GraphError::MalformedHeader(header.into()));
        }
        let mut edges = Vec::with_capacity(m);
        for (lineno, line) in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(GraphError::MalformedEdgeLine {
                    line: lineno,
                    reason: format!("expected 3 vertices, found {}", toks.len()),
                });
            }
            let mut v = [0usize; 3];
            for (slot, tok) in v.iter_mut().zip(&toks) {
                *slot = tok.parse().map_err(|_| GraphError::MalformedEdgeLine {
                    line: lineno,
                    reason: format!("bad vertex token {:?}", tok),
                })?;
            }
            edges.push(Triple::new(v[0], v[1], v[2])?);
        }
        if edges.len() != m {
            return Err(GraphError::EdgeCountMismatch { expected: m, found: edges.len() });
        }
        ThreeGraph::new(n, edges)
    }

    /// Canonical serialization; `from_text(to_text(g))` reproduces `g` exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{} {}\n", self.n, self.edges.len()));
        for e in &self.edges {
            out.push_str(&format!("{}\n", e));
        }
        out
    }
}

/// An ordered collection of pairwise-disjoint vertex triples. The triples
/// need not be edges: padded fixed-size systems mix real matching edges with
/// arbitrary disjoint triples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleSystem {
    tuples: Vec<Triple>,
}

impl TupleSystem {
    pub fn new(tuples: Vec<Triple>) -> Result<Self, GraphError> {
        for i in 0..tuples.len() {
            for j in i + 1..tuples.len() {
                if !tuples[i].is_disjoint(&tuples[j]) {
                    return Err(GraphError::OverlappingTuples(tuples[i], tuples[j]));
                }
            }
        }
        Ok(TupleSystem { tuples })
    }

    pub fn empty() -> Self {
        TupleSystem { tuples: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[Triple] {
        &self.tuples
    }

    pub fn covered_vertices(&self) -> VertexSet {
        self.tuples.iter().flat_map(|t| t.vertices()).collect()
    }

    pub fn covers(&self, v: Vertex) -> bool {
        self.tuples.iter().any(|t| t.contains(v))
    }

    /// Index of the tuple containing `v`, if any.
    pub fn tuple_of(&self, v: Vertex) -> Option<usize> {
        self.tuples.iter().position(|t| t.contains(v))
    }

    /// Replaces the tuples at `i` and `j` with two new (disjoint) triples.
    /// Used by the swap engine; the caller guarantees global disjointness.
    pub(crate) fn replace_pair(&mut self, i: usize, j: usize, a: Triple, b: Triple) {
        self.tuples[i] = a;
        self.tuples[j] = b;
        debug_assert!(
            TupleSystem::new(self.tuples.clone()).is_ok(),
            "swap produced overlapping tuples"
        );
    }

    pub fn push(&mut self, t: Triple) -> Result<(), GraphError> {
        for u in &self.tuples {
            if !u.is_disjoint(&t) {
                return Err(GraphError::OverlappingTuples(*u, t));
            }
        }
        self.tuples.push(t);
        Ok(())
    }

    pub fn truncate(&mut self, len: usize) {
        self.tuples.truncate(len);
    }
}

/// True iff the tuples are pairwise disjoint (guaranteed by the type) and
/// every tuple is an edge of `g`.
pub fn is_matching(g: &ThreeGraph, m: &TupleSystem) -> bool {
    m.tuples().iter().all(|t| g.has_edge(t))
}

/// Number of tuples of `m` that are edges of `g`.
pub fn edge_tuple_count(g: &ThreeGraph, m: &TupleSystem) -> usize {
    m.tuples().iter().filter(|t| g.has_edge(t)).count()
}

/// The leave: vertices of `g` not covered by `m`. `|leave| = n - 3|m|`.
pub fn leave(g: &ThreeGraph, m: &TupleSystem) -> VertexSet {
    let covered = m.covered_vertices();
    (0..g.n()).filter(|v| !covered.contains(v)).collect()
}
