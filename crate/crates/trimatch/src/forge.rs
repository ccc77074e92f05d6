//! Instance generators: the three extremal barrier families and a
//! best-effort planted degree-profile generator, all deterministic given
//! their parameters and seed.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degree::{
    choose2, rat, satisfies_profile, DegreeProfile, ProfileKind, Rat, parse_rat,
};
use crate::graph::{GraphError, ThreeGraph, Triple, Vertex};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ForgeError {
    #[error("n={0} invalid: {1}")]
    BadN(usize, &'static str),
    #[error("malformed instance spec {0:?}")]
    BadSpec(String),
    #[error("profile infeasible after {retries} attempts; closest shortfall: {closest}")]
    RetriesExhausted { retries: usize, closest: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid profile parameters: {0}")]
    Degree(#[from] crate::degree::DegreeError),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    IntroBarrier,
    SpaceBarrier,
    ParityBarrier,
    Complete,
    PlantedProfile,
}

/// A parsed instance description, e.g. `space:n=12` or
/// `planted:n=15,gamma=1/20,t=2,seed=1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub family: Family,
    pub n: usize,
    pub gamma: Option<Rat>,
    pub t: Option<usize>,
    pub seed: Option<u64>,
}

impl InstanceSpec {
    pub fn parse(s: &str) -> Result<Self, ForgeError> {
        let bad = || ForgeError::BadSpec(s.to_string());
        let (family, rest) = s.split_once(':').ok_or_else(bad)?;
        let family = match family.trim() {
            "intro" => Family::IntroBarrier,
            "space" => Family::SpaceBarrier,
            "parity" => Family::ParityBarrier,
            "complete" => Family::Complete,
            "planted" => Family::PlantedProfile,
            _ => return Err(bad()),
        };
        let mut n = None;
        let mut gamma = None;
        let mut t = None;
        let mut seed = None;
        for part in rest.split(',') {
            let (key, value) = part.split_once('=').ok_or_else(bad)?;
            let value = value.trim();
            match key.trim() {
                "n" => n = Some(value.parse().map_err(|_| bad())?),
                "gamma" => gamma = Some(parse_rat(value).map_err(|_| bad())?),
                "t" => t = Some(value.parse().map_err(|_| bad())?),
                "seed" => seed = Some(value.parse().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        let spec = InstanceSpec { family, n: n.ok_or_else(bad)?, gamma, t, seed };
        if spec.family == Family::PlantedProfile && (spec.gamma.is_none() || spec.t.is_none()) {
            return Err(bad());
        }
        Ok(spec)
    }

    pub fn generate(&self) -> Result<ThreeGraph, ForgeError> {
        match self.family {
            Family::IntroBarrier => gen_intro_barrier(self.n),
            Family::SpaceBarrier => gen_space_barrier(self.n),
            Family::ParityBarrier => gen_parity_barrier(self.n),
            Family::Complete => Ok(ThreeGraph::complete(self.n)),
            Family::PlantedProfile => gen_planted_profile(
                self.n,
                self.gamma.expect("checked at parse"),
                self.t.expect("checked at parse"),
                self.seed.unwrap_or(0),
            ),
        }
    }
}

fn require_triple_n(n: usize, min: usize) -> Result<(), ForgeError> {
    if n % 3 != 0 {
        return Err(ForgeError::BadN(n, "must be divisible by 3"));
    }
    if n < min {
        return Err(ForgeError::BadN(n, "too small for this family"));
    }
    Ok(())
}

/// Distinguished side `A = {0..n/3-2}` of size n/3 - 1; every triple meeting
/// `A` is an edge. A maximum matching saturates `A`, one edge short of
/// perfect.
pub fn gen_intro_barrier(n: usize) -> Result<ThreeGraph, ForgeError> {
    require_triple_n(n, 6)?;
    let a_size = n / 3 - 1;
    let edges = all_triples(n)
        .filter(|t| t.vertices()[0] < a_size)
        .collect::<Vec<_>>();
    Ok(ThreeGraph::new(n, edges)?)
}

/// Sparse side `A = {0..n/3}` of size n/3 + 1; edges use at most one vertex
/// of `A`, so `A` cannot be covered.
pub fn gen_space_barrier(n: usize) -> Result<ThreeGraph, ForgeError> {
    require_triple_n(n, 6)?;
    let a_size = n / 3 + 1;
    let edges = all_triples(n)
        .filter(|t| t.vertices().iter().filter(|&&v| v < a_size).count() <= 1)
        .collect::<Vec<_>>();
    Ok(ThreeGraph::new(n, edges)?)
}

/// Odd side `A = {0..n/3-1}` (requires n/3 odd); edges meet `A` in an even
/// number of vertices, so `A` cannot be covered by disjoint edges.
pub fn gen_parity_barrier(n: usize) -> Result<ThreeGraph, ForgeError> {
    require_triple_n(n, 9)?;
    if (n / 3) % 2 == 0 {
        return Err(ForgeError::BadN(n, "n/3 must be odd for the parity family"));
    }
    let a_size = n / 3;
    let edges = all_triples(n)
        .filter(|t| t.vertices().iter().filter(|&&v| v < a_size).count() % 2 == 0)
        .collect::<Vec<_>>();
    Ok(ThreeGraph::new(n, edges)?)
}

fn all_triples(n: usize) -> impl Iterator<Item = Triple> {
    (0..n).flat_map(move |a| {
        (a + 1..n).flat_map(move |b| {
            (b + 1..n).map(move |c| Triple::new(a, b, c).expect("a<b<c distinct"))
        })
    })
}

/// Planted Main-profile instance: start complete, then prune edges at the
/// intended low-rank vertices `0..n/3` down to per-rank targets. Removal
/// prefers edges whose other endpoints are both high-rank; edges touching a
/// second low vertex are used only when forced. The result is re-checked and
/// regenerated under sub-seeds until `satisfies_profile` passes.
pub fn gen_planted_profile(
    n: usize,
    gamma: Rat,
    t: usize,
    seed: u64,
) -> Result<ThreeGraph, ForgeError> {
    require_triple_n(n, 6)?;
    let profile = DegreeProfile::new(ProfileKind::Main, gamma, t)?;
    profile.validate(n)?;

    // Targets at or above the complete degree leave nothing to remove; the
    // complete graph is the (degenerate) plant even when the curve itself is
    // unsatisfiable.
    if planted_targets(n, gamma, t).iter().all(|&t| t >= choose2(n - 1) as usize) {
        return Ok(ThreeGraph::complete(n));
    }

    const RETRIES: usize = 32;
    let mut closest = String::from("no attempt recorded");
    for attempt in 0..RETRIES {
        let sub_seed = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(attempt as u64);
        let g = plant_once(n, gamma, t, sub_seed)?;
        let check = satisfies_profile(&g, &profile)?;
        if check.satisfied {
            return Ok(g);
        }
        closest = format!("attempt {}: {:?}", attempt, check.first_violation);
    }
    Err(ForgeError::RetriesExhausted { retries: RETRIES, closest })
}

/// Per-rank degree targets for the low vertices: stepped band then flat
/// middle band, capped at the complete degree.
fn planted_targets(n: usize, gamma: Rat, t: usize) -> Vec<usize> {
    let pairs = Rat::from_integer(choose2(n));
    let complete_degree = choose2(n - 1) as usize;
    let ceil = |r: Rat| -> usize {
        let v = r.ceil().to_integer();
        (v.max(0) as usize).min(complete_degree)
    };
    (0..n / 3)
        .map(|i| {
            let rank = i + 1;
            if rank <= t {
                (ceil((rat(1, 3) + gamma) * pairs) + rank * t).min(complete_degree)
            } else {
                ceil((rat(4, 9) + gamma) * pairs)
            }
        })
        .collect()
}

fn plant_once(n: usize, gamma: Rat, t: usize, seed: u64) -> Result<ThreeGraph, ForgeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = Rat::from_integer(choose2(n));
    let complete_degree = choose2(n - 1) as usize;
    let low_count = n / 3;

    let target = planted_targets(n, gamma, t);
    let high_floor = {
        let v = ((rat(5, 9) + gamma) * pairs).ceil().to_integer();
        (v.max(0) as usize).min(complete_degree)
    };

    let mut edges: std::collections::BTreeSet<Triple> = all_triples(n).collect();
    let mut deg = vec![complete_degree; n];
    let floor_of = |v: Vertex| if v < low_count { target[v] } else { high_floor };

    for v in 0..low_count {
        while deg[v] > target[v] {
            // phase 1: both other endpoints high and strictly above floor
            let single: Vec<Triple> = edges
                .iter()
                .filter(|e| {
                    e.contains(v)
                        && e.vertices()
                            .iter()
                            .all(|&u| u == v || (u >= low_count && deg[u] > high_floor))
                })
                .copied()
                .collect();
            let pool = if !single.is_empty() {
                single
            } else {
                // phase 2 (forced): any edge at v whose other endpoints can
                // still afford the loss
                edges
                    .iter()
                    .filter(|e| {
                        e.contains(v)
                            && e.vertices().iter().all(|&u| u == v || deg[u] > floor_of(u))
                    })
                    .copied()
                    .collect()
            };
            if pool.is_empty() {
                break; // stuck; the profile re-check decides the outcome
            }
            let pick = pool[rng.gen_range(0..pool.len())];
            edges.remove(&pick);
            for u in pick.vertices() {
                deg[u] -= 1;
            }
        }
    }
    Ok(ThreeGraph::new(n, edges)?)
}
