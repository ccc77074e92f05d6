//! Link graphs of a vertex against a system of disjoint triples: the general
//! cross-tuple link graph, and the 9-bit mask form used for a single pair of
//! triples. The whole finite case analysis downstream enumerates over these
//! 512 masks.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{ThreeGraph, Triple, TupleSystem, Vertex, VertexSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinkError {
    #[error("center vertex {0} lies inside the tuple system")]
    CenterInTuples(Vertex),
    #[error("tuples must be disjoint")]
    TuplesOverlap,
}

/// Link graph of `center` against a tuple system: edges are pairs of vertices
/// from distinct tuples that form a hyperedge together with `center`.
#[derive(Clone, Debug)]
pub struct LinkGraph {
    center: Vertex,
    tuples: TupleSystem,
    edges: BTreeSet<(Vertex, Vertex)>,
}

impl LinkGraph {
    pub fn center(&self) -> Vertex {
        self.center
    }

    pub fn tuples(&self) -> &TupleSystem {
        &self.tuples
    }

    /// Link edges as ordered pairs `(u, w)` with `u < w`.
    pub fn edges(&self) -> &BTreeSet<(Vertex, Vertex)> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// Builds the link graph of `v` against `u`. Pairs inside one tuple never
/// appear, and every edge is validated against `g` at construction.
pub fn link_graph(g: &ThreeGraph, u: &TupleSystem, v: Vertex) -> Result<LinkGraph, LinkError> {
    if u.covers(v) {
        return Err(LinkError::CenterInTuples(v));
    }
    let mut edges = BTreeSet::new();
    let tuples = u.tuples();
    for (i, e) in tuples.iter().enumerate() {
        for f in &tuples[i + 1..] {
            for a in e.vertices() {
                for b in f.vertices() {
                    if g.has_triple(v, a, b) {
                        edges.insert((a.min(b), a.max(b)));
                    }
                }
            }
        }
    }
    Ok(LinkGraph { center: v, tuples: u.clone(), edges })
}

/// Bit position of the cross pair `(e_i, f_j)` in a pair-link mask:
/// row-major, `3*i + j`.
pub const fn cross_bit(i: usize, j: usize) -> u16 {
    1 << (3 * i + j)
}

/// All nine bits of a pair-link mask.
pub const FULL_MASK: u16 = 0x1FF;

/// A cross pair, addressed by position within the two triples.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossPos {
    pub e_idx: usize,
    pub f_idx: usize,
}

impl CrossPos {
    pub fn bit(&self) -> u16 {
        cross_bit(self.e_idx, self.f_idx)
    }

    pub fn from_bit(bit: usize) -> CrossPos {
        CrossPos { e_idx: bit / 3, f_idx: bit % 3 }
    }

    /// Two cross pairs are disjoint when they use distinct vertices of both
    /// triples.
    pub fn disjoint(&self, other: &CrossPos) -> bool {
        self.e_idx != other.e_idx && self.f_idx != other.f_idx
    }
}

/// Link graph of a center vertex restricted to a single pair of disjoint
/// triples, packed into a 9-bit mask. At most 9 edges by construction.
#[derive(Copy, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairLink {
    pub center: Vertex,
    pub e: Triple,
    pub f: Triple,
    pub mask: u16,
}

impl PairLink {
    pub fn edge_count(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn has_cross(&self, pos: CrossPos) -> bool {
        self.mask & pos.bit() != 0
    }

    /// Degree of the vertex at position `i` of the first triple.
    pub fn e_degree(&self, i: usize) -> u32 {
        (self.mask >> (3 * i) & 0b111).count_ones()
    }

    /// Degree of the vertex at position `j` of the second triple.
    pub fn f_degree(&self, j: usize) -> u32 {
        (self.mask & (cross_bit(0, j) | cross_bit(1, j) | cross_bit(2, j))).count_ones()
    }

    /// Position of `v` within the pair, if present: `(which_triple, index)`.
    fn position(&self, v: Vertex) -> Option<(bool, usize)> {
        if let Some(i) = self.e.vertices().iter().position(|&x| x == v) {
            return Some((true, i));
        }
        self.f.vertices().iter().position(|&x| x == v).map(|j| (false, j))
    }

    /// The hyperedge of the source graph that a cross pair stands for.
    pub fn hyperedge(&self, pos: CrossPos) -> Triple {
        Triple::new(self.center, self.e.vertices()[pos.e_idx], self.f.vertices()[pos.f_idx])
            .expect("cross pair vertices are distinct from the center")
    }
}

impl fmt::Debug for PairLink {
    /// 3x3 0/1 matrix, rows indexed by the first triple.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PairLink center={} e={:?} f={:?}", self.center, self.e, self.f)?;
        for i in 0..3 {
            for j in 0..3 {
                write!(f, "{}", if self.has_cross(CrossPos { e_idx: i, f_idx: j }) { 1 } else { 0 })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Pair link of `v` against disjoint triples `e`, `f`.
pub fn pair_link(g: &ThreeGraph, e: Triple, f: Triple, v: Vertex) -> Result<PairLink, LinkError> {
    if !e.is_disjoint(&f) {
        return Err(LinkError::TuplesOverlap);
    }
    if e.contains(v) || f.contains(v) {
        return Err(LinkError::CenterInTuples(v));
    }
    let ev = e.vertices();
    let fv = f.vertices();
    let mut mask = 0u16;
    for i in 0..3 {
        for j in 0..3 {
            if g.has_triple(v, ev[i], fv[j]) {
                mask |= cross_bit(i, j);
            }
        }
    }
    Ok(PairLink { center: v, e, f, mask })
}

/// True iff `v`'s degree in the pair link is exactly 3 (all its cross pairs
/// present).
pub fn star_at(l: &PairLink, v: Vertex) -> bool {
    match l.position(v) {
        Some((true, i)) => l.e_degree(i) == 3,
        Some((false, j)) => l.f_degree(j) == 3,
        None => false,
    }
}

/// True iff there are stars at both `e_i` and `f_j`.
pub fn fan_at(l: &PairLink, e_i: Vertex, f_j: Vertex) -> bool {
    matches!(l.position(e_i), Some((true, _)))
        && matches!(l.position(f_j), Some((false, _)))
        && star_at(l, e_i)
        && star_at(l, f_j)
}

/// Number of edges at `x` that are *not* cross pairs of distinct tuples of
/// `m`: edges touching another leave vertex, or two vertices of one tuple.
pub fn count_non_link_edges(g: &ThreeGraph, m: &TupleSystem, x: Vertex) -> usize {
    assert!(!m.covers(x), "x must lie in the leave of the tuple system");
    let mut count = 0;
    for &ei in g.incident_edges(x) {
        let edge = g.edges()[ei];
        let others: Vec<Vertex> = edge.vertices().into_iter().filter(|&v| v != x).collect();
        let ta = m.tuple_of(others[0]);
        let tb = m.tuple_of(others[1]);
        let cross = matches!((ta, tb), (Some(a), Some(b)) if a != b);
        if !cross {
            count += 1;
        }
    }
    count
}

/// Leave vertices of a graph with respect to a tuple system, as a set.
pub fn leave_set(g: &ThreeGraph, m: &TupleSystem) -> VertexSet {
    crate::graph::leave(g, m)
}
