//! Exact perfect-matching decision and maximum-matching search for small
//! instances; the ground truth every other component is checked against.
//! Sound and complete within the configured vertex limit; budget overruns
//! surface as an explicit `Timeout`, never as a wrong answer.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{ThreeGraph, Triple, Vertex, VertexSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {0} vertices, above the configured oracle limit {1}")]
    OverLimit(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Hard vertex-count limit; a knob, not a semantic constant.
    pub limit: usize,
    pub node_budget: Option<u64>,
    pub time_budget: Option<Duration>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { limit: 30, node_budget: None, time_budget: None }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    PerfectMatchingExists,
    NoPerfectMatching,
    /// Budget exhausted before the search completed.
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub decision: Decision,
    pub witness: Option<Vec<Triple>>,
    pub max_size: Option<usize>,
    pub nodes_explored: u64,
}

struct Search<'a> {
    g: &'a ThreeGraph,
    covered: Vec<bool>,
    nodes: u64,
    node_budget: Option<u64>,
    deadline: Option<Instant>,
    timed_out: bool,
}

impl<'a> Search<'a> {
    fn new(g: &'a ThreeGraph, cfg: &OracleConfig) -> Self {
        Search {
            g,
            covered: vec![false; g.n()],
            nodes: 0,
            node_budget: cfg.node_budget,
            deadline: cfg.time_budget.map(|d| Instant::now() + d),
            timed_out: false,
        }
    }

    fn out_of_budget(&mut self) -> bool {
        if self.timed_out {
            return true;
        }
        if let Some(b) = self.node_budget {
            if self.nodes > b {
                self.timed_out = true;
                return true;
            }
        }
        if let Some(d) = self.deadline {
            // Amortize the clock read; node counts grow fast.
            if self.nodes % 1024 == 0 && Instant::now() > d {
                self.timed_out = true;
                return true;
            }
        }
        false
    }

    fn uncovered_edge(&self, idx: usize) -> Option<Triple> {
        let e = self.g.edges()[idx];
        if e.vertices().iter().all(|&v| !self.covered[v]) {
            Some(e)
        } else {
            None
        }
    }

    /// Every uncovered vertex must still have an edge inside the uncovered
    /// region, otherwise the branch is dead.
    fn all_uncovered_have_options(&self) -> bool {
        (0..self.g.n()).all(|v| {
            self.covered[v]
                || self
                    .g
                    .incident_edges(v)
                    .iter()
                    .any(|&ei| self.uncovered_edge(ei).is_some())
        })
    }

    /// Backtracking on the lowest-id uncovered vertex.
    fn decide(&mut self, remaining: usize, partial: &mut Vec<Triple>) -> bool {
        self.nodes += 1;
        if self.out_of_budget() {
            return false;
        }
        if remaining == 0 {
            return true;
        }
        if !self.all_uncovered_have_options() {
            return false;
        }
        let v = (0..self.g.n()).find(|&v| !self.covered[v]).expect("remaining > 0");
        let edge_indices: Vec<usize> = self.g.incident_edges(v).to_vec();
        for ei in edge_indices {
            let Some(e) = self.uncovered_edge(ei) else { continue };
            for u in e.vertices() {
                self.covered[u] = true;
            }
            partial.push(e);
            if self.decide(remaining - 3, partial) {
                return true;
            }
            partial.pop();
            for u in e.vertices() {
                self.covered[u] = false;
            }
        }
        false
    }

    /// Branch and bound for the maximum matching: pick the uncovered vertex
    /// with the fewest available edges, then either use one of them or leave
    /// the vertex uncovered.
    fn maximize(
        &mut self,
        uncovered: usize,
        partial: &mut Vec<Triple>,
        best: &mut Vec<Triple>,
    ) {
        self.nodes += 1;
        if self.out_of_budget() {
            return;
        }
        if partial.len() + uncovered / 3 <= best.len() {
            return; // even covering everything left cannot beat the best
        }
        let mut branch: Option<(Vertex, Vec<Triple>)> = None;
        for v in 0..self.g.n() {
            if self.covered[v] {
                continue;
            }
            let avail: Vec<Triple> = self
                .g
                .incident_edges(v)
                .iter()
                .filter_map(|&ei| self.uncovered_edge(ei))
                .collect();
            let better = match &branch {
                None => true,
                Some((_, a)) => avail.len() < a.len(),
            };
            if better {
                let exhausted = avail.is_empty();
                branch = Some((v, avail));
                if exhausted {
                    break;
                }
            }
        }
        let Some((v, avail)) = branch else {
            if partial.len() > best.len() {
                *best = partial.clone();
            }
            return;
        };
        for e in avail {
            for u in e.vertices() {
                self.covered[u] = true;
            }
            partial.push(e);
            self.maximize(uncovered - 3, partial, best);
            partial.pop();
            for u in e.vertices() {
                self.covered[u] = false;
            }
        }
        // exclude v entirely
        self.covered[v] = true;
        self.maximize(uncovered - 1, partial, best);
        self.covered[v] = false;
        if partial.len() > best.len() {
            *best = partial.clone();
        }
    }
}

/// Exact perfect-matching decision. `n` not divisible by 3 decides trivially.
pub fn has_perfect_matching(g: &ThreeGraph, cfg: &OracleConfig) -> Result<OracleResult, OracleError> {
    if g.n() > cfg.limit {
        return Err(OracleError::OverLimit(g.n(), cfg.limit));
    }
    if g.n() % 3 != 0 {
        return Ok(OracleResult {
            decision: Decision::NoPerfectMatching,
            witness: None,
            max_size: None,
            nodes_explored: 0,
        });
    }
    let mut search = Search::new(g, cfg);
    let mut partial = Vec::new();
    let found = search.decide(g.n(), &mut partial);
    let decision = if found {
        Decision::PerfectMatchingExists
    } else if search.timed_out {
        Decision::Timeout
    } else {
        Decision::NoPerfectMatching
    };
    Ok(OracleResult {
        decision,
        witness: found.then_some(partial),
        max_size: None,
        nodes_explored: search.nodes,
    })
}

/// Exact maximum matching size with a witness.
pub fn max_matching_size(g: &ThreeGraph, cfg: &OracleConfig) -> Result<OracleResult, OracleError> {
    if g.n() > cfg.limit {
        return Err(OracleError::OverLimit(g.n(), cfg.limit));
    }
    let mut search = Search::new(g, cfg);
    let mut partial = Vec::new();
    let mut best = Vec::new();
    search.maximize(g.n(), &mut partial, &mut best);
    let decision = if search.timed_out {
        Decision::Timeout
    } else if 3 * best.len() == g.n() {
        Decision::PerfectMatchingExists
    } else {
        Decision::NoPerfectMatching
    };
    Ok(OracleResult {
        decision,
        max_size: (!search.timed_out).then_some(best.len()),
        witness: Some(best),
        nodes_explored: search.nodes,
    })
}

/// Perfect matching of the vertices in `region` using only edges inside it.
/// Plain backtracking; intended for constant-size regions.
pub fn perfect_matching_within(g: &ThreeGraph, region: &VertexSet) -> Option<Vec<Triple>> {
    if region.len() % 3 != 0 {
        return None;
    }
    fn go(g: &ThreeGraph, remaining: &VertexSet, acc: &mut Vec<Triple>) -> bool {
        let Some(&v) = remaining.iter().next() else { return true };
        for &ei in g.incident_edges(v) {
            let e = g.edges()[ei];
            if e.vertices().iter().all(|u| remaining.contains(u)) {
                let rest: VertexSet =
                    remaining.iter().copied().filter(|u| !e.contains(*u)).collect();
                acc.push(e);
                if go(g, &rest, acc) {
                    return true;
                }
                acc.pop();
            }
        }
        false
    }
    let mut acc = Vec::new();
    go(g, region, &mut acc).then_some(acc)
}

// ---------------------------------------------------------------------------
// Obstruction certificates
// ---------------------------------------------------------------------------

/// Human-readable reason a graph has no perfect matching. The certifier is
/// deliberately incomplete: it recognizes the two classical obstructions and
/// nothing else.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Obstruction {
    /// A set `A` with more than n/3 vertices such that every edge uses at
    /// most one vertex of `A`: covering `A` would need more than the rest of
    /// the graph provides.
    Space { a: Vec<Vertex> },
    /// An odd-size set `A` meeting every edge in an even number of vertices:
    /// no disjoint edges can cover `A`.
    Parity { a: Vec<Vertex> },
}

/// Searches for a space or parity obstruction, in that order.
pub fn certify_no_pm(g: &ThreeGraph) -> Option<Obstruction> {
    if let Some(a) = space_obstruction(g) {
        return Some(Obstruction::Space { a });
    }
    parity_obstruction(g).map(|a| Obstruction::Parity { a })
}

/// Max independent set in the pair graph "u,v co-occur in some edge"; if it
/// exceeds n/3 it is a space obstruction.
fn space_obstruction(g: &ThreeGraph) -> Option<Vec<Vertex>> {
    let n = g.n();
    let mut adj = vec![vec![false; n]; n];
    for e in g.edges() {
        let [a, b, c] = e.vertices();
        adj[a][b] = true;
        adj[b][a] = true;
        adj[a][c] = true;
        adj[c][a] = true;
        adj[b][c] = true;
        adj[c][b] = true;
    }
    fn mis(
        adj: &[Vec<bool>],
        candidates: &[Vertex],
        current: &mut Vec<Vertex>,
        best: &mut Vec<Vertex>,
    ) {
        if current.len() + candidates.len() <= best.len() {
            return;
        }
        let Some((&v, rest)) = candidates.split_first() else {
            if current.len() > best.len() {
                *best = current.clone();
            }
            return;
        };
        // include v
        let filtered: Vec<Vertex> = rest.iter().copied().filter(|&u| !adj[v][u]).collect();
        current.push(v);
        mis(adj, &filtered, current, best);
        current.pop();
        // exclude v
        mis(adj, rest, current, best);
    }
    let candidates: Vec<Vertex> = (0..n).collect();
    let mut best = Vec::new();
    mis(&adj, &candidates, &mut Vec::new(), &mut best);
    if 3 * best.len() > n {
        best.sort_unstable();
        Some(best)
    } else {
        None
    }
}

/// Solves `sum of x_v over each edge = 0 (mod 2)` and looks for an odd-weight
/// kernel vector. Parity of the weight is linear, so it suffices to check the
/// kernel basis.
fn parity_obstruction(g: &ThreeGraph) -> Option<Vec<Vertex>> {
    let n = g.n();
    if n > 64 {
        return None;
    }
    let mut rows: Vec<u64> = g
        .edges()
        .iter()
        .map(|e| e.vertices().iter().fold(0u64, |m, &v| m | (1 << v)))
        .collect();
    // Gaussian elimination to row-echelon form over GF(2).
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(pivot) = (r..rows.len()).find(|&i| rows[i] >> col & 1 == 1) else {
            continue;
        };
        rows.swap(r, pivot);
        for i in 0..rows.len() {
            if i != r && rows[i] >> col & 1 == 1 {
                rows[i] ^= rows[r];
            }
        }
        pivots.push(col);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    for &fc in &free {
        // kernel basis vector for free column fc
        let mut x = 1u64 << fc;
        for (i, &pc) in pivots.iter().enumerate() {
            if rows[i] >> fc & 1 == 1 {
                x |= 1 << pc;
            }
        }
        if x.count_ones() % 2 == 1 {
            let a: Vec<Vertex> = (0..n).filter(|&v| x >> v & 1 == 1).collect();
            return Some(a);
        }
    }
    None
}
