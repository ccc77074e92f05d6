// Each integration binary compiles this module separately and uses a
// different subset of it.
#![allow(dead_code)]

//! Shared helpers for the integration suites: independent brute-force
//! oracles (deliberately unrelated to the library's search code) and seeded
//! random instances.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use trimatch::graph::{ThreeGraph, Triple, Vertex};

/// Ground-truth perfect-matching decision by enumerating every partition of
/// the vertex set into triples and checking each completed partition against
/// the edge list. No pruning, no sharing with the library search.
pub fn naive_has_pm(g: &ThreeGraph) -> bool {
    if g.n() % 3 != 0 {
        return false;
    }
    fn partitions(g: &ThreeGraph, remaining: &[Vertex], chosen: &mut Vec<[Vertex; 3]>) -> bool {
        let Some((&v, rest)) = remaining.split_first() else {
            return chosen.iter().all(|&[a, b, c]| g.has_triple(a, b, c));
        };
        for i in 0..rest.len() {
            for j in i + 1..rest.len() {
                let mut next: Vec<Vertex> = Vec::with_capacity(rest.len() - 2);
                for (k, &u) in rest.iter().enumerate() {
                    if k != i && k != j {
                        next.push(u);
                    }
                }
                chosen.push([v, rest[i], rest[j]]);
                if partitions(g, &next, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let vertices: Vec<Vertex> = (0..g.n()).collect();
    partitions(g, &vertices, &mut Vec::new())
}

/// Seeded random 3-graph: each triple kept with probability `num/den`.
pub fn random_graph(n: usize, num: u32, den: u32, seed: u64) -> ThreeGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if rng.gen_ratio(num, den) {
                    edges.push(Triple::new(a, b, c).unwrap());
                }
            }
        }
    }
    ThreeGraph::new(n, edges).unwrap()
}

/// Definitional absorbing-set check by direct enumeration: some split of the
/// 6-set into two edges, and some partition of the 9 vertices into three
/// edges.
pub fn brute_is_absorbing(g: &ThreeGraph, a: &[Vertex; 6], t: &[Vertex; 3]) -> bool {
    let mut two = false;
    for i in 1..6 {
        for j in i + 1..6 {
            let first = [a[0], a[i], a[j]];
            let rest: Vec<Vertex> =
                (1..6).filter(|&k| k != i && k != j).map(|k| a[k]).collect();
            if g.has_triple(first[0], first[1], first[2])
                && g.has_triple(rest[0], rest[1], rest[2])
            {
                two = true;
            }
        }
    }
    if !two {
        return false;
    }
    let nine: Vec<Vertex> = a.iter().chain(t.iter()).copied().collect();
    fn three_split(g: &ThreeGraph, remaining: &[Vertex]) -> bool {
        let Some((&v, rest)) = remaining.split_first() else { return true };
        for i in 0..rest.len() {
            for j in i + 1..rest.len() {
                if g.has_triple(v, rest[i], rest[j]) {
                    let next: Vec<Vertex> = rest
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != i && *k != j)
                        .map(|(_, &u)| u)
                        .collect();
                    if three_split(g, &next) {
                        return true;
                    }
                }
            }
        }
        false
    }
    three_split(g, &nine)
}

/// The five-edge absorbing gadget on nine labelled vertices: T = {0,1,2},
/// A = {3..8}, and exactly the edges realizing the absorption.
pub fn template_graph() -> ThreeGraph {
    ThreeGraph::from_raw_edges(
        9,
        [[3, 5, 6], [4, 7, 8], [0, 3, 4], [1, 5, 6], [2, 7, 8]],
    )
    .unwrap()
}
