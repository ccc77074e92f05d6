//! Absorbing machinery: 6-vertex sets that can swallow one extra triple,
//! deterministic greedy family construction, and the absorption step that
//! turns an almost-perfect matching into a perfect one.

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degree::{classify, ClassMap, DegreeProfile, Rat};
use crate::graph::{ThreeGraph, Triple, Vertex, VertexSet};
use crate::oracle::perfect_matching_within;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AbsorbError {
    #[error("absorbing set needs 6 distinct vertices")]
    WrongSetSize,
    #[error("set and triple must be disjoint")]
    Overlap,
    #[error("degree profile not satisfied (pass force to override): {0}")]
    ProfileViolated(String),
    #[error("|W| = {0} is not divisible by 3")]
    WNotDivisible(usize),
    #[error("W intersects the family vertices at {0}")]
    WIntersectsFamily(Vertex),
    #[error("W needs at least two thirds Big vertices ({big} of {size})")]
    WNotEnoughBig { big: usize, size: usize },
    #[error("no unused absorbing set left for triple {0:?}")]
    Unabsorbable(Triple),
    #[error("malformed family line {line}: {reason}")]
    MalformedFamily { line: usize, reason: String },
}

/// A 6-vertex set, stored sorted.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AbsorbingSet([Vertex; 6]);

impl AbsorbingSet {
    pub fn new(mut vs: [Vertex; 6]) -> Result<Self, AbsorbError> {
        vs.sort_unstable();
        if vs.windows(2).any(|w| w[0] == w[1]) {
            return Err(AbsorbError::WrongSetSize);
        }
        Ok(AbsorbingSet(vs))
    }

    pub fn vertices(&self) -> [Vertex; 6] {
        self.0
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.contains(&v)
    }

    pub fn disjoint_from_triple(&self, t: &Triple) -> bool {
        t.vertices().iter().all(|v| !self.contains(*v))
    }

    pub fn disjoint_from_set(&self, other: &AbsorbingSet) -> bool {
        self.0.iter().all(|v| !other.contains(*v))
    }

    fn vertex_set(&self) -> VertexSet {
        self.0.iter().copied().collect()
    }
}

/// True iff `H[a]` has a 2-edge matching and `H[a ∪ t]` a 3-edge matching,
/// both found by exhaustive search over the constant-size regions.
pub fn is_absorbing_set(g: &ThreeGraph, a: &AbsorbingSet, t: &Triple) -> Result<bool, AbsorbError> {
    if !a.disjoint_from_triple(t) {
        return Err(AbsorbError::Overlap);
    }
    let inner = a.vertex_set();
    if perfect_matching_within(g, &inner).is_none() {
        return Ok(false);
    }
    let mut joint = inner;
    joint.extend(t.vertices());
    Ok(perfect_matching_within(g, &joint).is_some())
}

/// Visits absorbing sets for `t` in deterministic order until `visit`
/// returns true.
///
/// First the constructive route: an edge `{v1,u2,u3}` through the non-Big
/// vertex of `t` avoiding Small vertices, completed by pair gadgets
/// `{v2,a2,b2}/{a2,b2,u2}` and `{v3,a3,b3}/{a3,b3,u3}`. Then, for small
/// graphs, an exhaustive sweep over all 6-subsets. Duplicates are visited
/// once.
fn visit_absorbing_sets(
    g: &ThreeGraph,
    classes: &ClassMap,
    t: &Triple,
    mut visit: impl FnMut(AbsorbingSet) -> bool,
) {
    let mut seen: std::collections::BTreeSet<AbsorbingSet> = std::collections::BTreeSet::new();
    let mut push = |s: AbsorbingSet, stop: &mut bool| {
        if seen.insert(s) && visit(s) {
            *stop = true;
        }
    };
    let mut stop = false;

    'recipe: for &v1 in t.vertices().iter() {
        let rest: Vec<Vertex> = t.vertices().into_iter().filter(|&u| u != v1).collect();
        let (v2, v3) = (rest[0], rest[1]);
        if !classes.is_big(v2) || !classes.is_big(v3) {
            continue;
        }
        for &ei in g.incident_edges(v1) {
            let e = g.edges()[ei];
            let uu: Vec<Vertex> = e.vertices().into_iter().filter(|&u| u != v1).collect();
            if uu.iter().any(|&u| t.contains(u) || classes.is_small(u)) {
                continue;
            }
            for (u2, u3) in [(uu[0], uu[1]), (uu[1], uu[0])] {
                let blocked = [v1, v2, v3, u2, u3];
                for a2 in 0..g.n() {
                    for b2 in a2 + 1..g.n() {
                        if blocked.contains(&a2) || blocked.contains(&b2) {
                            continue;
                        }
                        if !g.has_triple(v2, a2, b2) || !g.has_triple(a2, b2, u2) {
                            continue;
                        }
                        for a3 in 0..g.n() {
                            for b3 in a3 + 1..g.n() {
                                if blocked.contains(&a3)
                                    || blocked.contains(&b3)
                                    || [a2, b2].contains(&a3)
                                    || [a2, b2].contains(&b3)
                                {
                                    continue;
                                }
                                if !g.has_triple(v3, a3, b3) || !g.has_triple(a3, b3, u3) {
                                    continue;
                                }
                                let set = AbsorbingSet::new([u2, u3, a2, b2, a3, b3])
                                    .expect("gadget vertices are distinct");
                                push(set, &mut stop);
                                if stop {
                                    break 'recipe;
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    // Exhaustive fallback keeps small instances complete even when the
    // class-guided recipe finds nothing.
    if !stop && g.n() <= 24 {
        let pool: Vec<Vertex> = (0..g.n()).filter(|&v| !t.contains(v)).collect();
        let mut idx = [0usize; 6];
        enumerate_six_subsets(&pool, &mut idx, 0, 0, &mut |vs| {
            let set = AbsorbingSet::new(vs).expect("pool vertices are distinct");
            if is_absorbing_set(g, &set, t).expect("pool avoids t") {
                push(set, &mut stop);
            }
            stop
        });
    }
}

/// Enumerates absorbing sets for `t`, up to `limit`, in deterministic order.
pub fn enumerate_absorbing_sets(
    g: &ThreeGraph,
    classes: &ClassMap,
    t: &Triple,
    limit: usize,
) -> Vec<AbsorbingSet> {
    let mut found = Vec::new();
    if limit == 0 {
        return found;
    }
    visit_absorbing_sets(g, classes, t, |s| {
        found.push(s);
        found.len() >= limit
    });
    found
}

fn enumerate_six_subsets(
    pool: &[Vertex],
    idx: &mut [usize; 6],
    depth: usize,
    start: usize,
    visit: &mut impl FnMut([Vertex; 6]) -> bool,
) -> bool {
    if depth == 6 {
        return visit([
            pool[idx[0]],
            pool[idx[1]],
            pool[idx[2]],
            pool[idx[3]],
            pool[idx[4]],
            pool[idx[5]],
        ]);
    }
    for i in start..pool.len() {
        idx[depth] = i;
        if enumerate_six_subsets(pool, idx, depth + 1, i + 1, visit) {
            return true;
        }
    }
    false
}

/// One family member: a disjoint absorbing set together with its internal
/// 2-edge matching.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyEntry {
    pub set: AbsorbingSet,
    pub base: [Triple; 2],
}

/// A collection of pairwise-disjoint absorbing sets; `base_matching` covers
/// exactly the family vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsorbingFamily {
    pub entries: Vec<FamilyEntry>,
}

impl AbsorbingFamily {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn base_matching(&self) -> Vec<Triple> {
        self.entries.iter().flat_map(|e| e.base).collect()
    }

    pub fn covered_vertices(&self) -> VertexSet {
        self.entries.iter().flat_map(|e| e.set.vertices()).collect()
    }

    /// One line per set: `a1 a2 a3 a4 a5 a6 | x1 x2 x3  y1 y2 y3`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let [a, b, c, d, x, y] = e.set.vertices();
            out.push_str(&format!(
                "{} {} {} {} {} {} | {}  {}\n",
                a, b, c, d, x, y, e.base[0], e.base[1]
            ));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, AbsorbError> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: &str| AbsorbError::MalformedFamily {
                line: lineno + 1,
                reason: reason.to_string(),
            };
            let (set_part, base_part) = line.split_once('|').ok_or_else(|| bad("missing |"))?;
            let set_vs: Vec<Vertex> = set_part
                .split_whitespace()
                .map(|x| x.parse().map_err(|_| bad("bad vertex")))
                .collect::<Result<_, _>>()?;
            if set_vs.len() != 6 {
                return Err(bad("expected 6 set vertices"));
            }
            let base_vs: Vec<Vertex> = base_part
                .split_whitespace()
                .map(|x| x.parse().map_err(|_| bad("bad vertex")))
                .collect::<Result<_, _>>()?;
            if base_vs.len() != 6 {
                return Err(bad("expected 6 base-matching vertices"));
            }
            let set = AbsorbingSet::new(set_vs.try_into().expect("length checked"))?;
            let e0 = Triple::new(base_vs[0], base_vs[1], base_vs[2])
                .map_err(|_| bad("base edge repeats a vertex"))?;
            let e1 = Triple::new(base_vs[3], base_vs[4], base_vs[5])
                .map_err(|_| bad("base edge repeats a vertex"))?;
            if !e0.is_disjoint(&e1)
                || !e0.vertices().iter().chain(e1.vertices().iter()).all(|v| set.contains(*v))
            {
                return Err(bad("base matching must partition the set"));
            }
            entries.push(FamilyEntry { set, base: [e0, e1] });
        }
        let fam = AbsorbingFamily { entries };
        for i in 0..fam.entries.len() {
            for j in i + 1..fam.entries.len() {
                if !fam.entries[i].set.disjoint_from_set(&fam.entries[j].set) {
                    return Err(AbsorbError::Overlap);
                }
            }
        }
        Ok(fam)
    }
}

/// Construction report: the family plus per-candidate coverage diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BuildOutcome {
    pub family: AbsorbingFamily,
    pub budget: usize,
    /// Triples with at least two Big vertices, i.e. what absorption may be
    /// asked to handle.
    pub candidate_triples: usize,
    /// coverage count -> number of candidate triples with that many
    /// absorbing sets available in the family.
    pub coverage_histogram: BTreeMap<usize, usize>,
    /// Candidates no family set can absorb (expected at small scale).
    pub uncovered: usize,
}

/// Budget from the profile: `floor(gamma^4 * n / 3)` sets.
pub fn default_budget(gamma: Rat, n: usize) -> usize {
    let g4 = gamma * gamma * gamma * gamma;
    let b = (g4 * Rat::from_integer(n as i128) / Rat::from_integer(3)).floor().to_integer();
    b.max(0) as usize
}

/// Greedy deterministic family construction: candidate triples (two or more
/// Big vertices) are visited in a seeded random order; each still-uncovered
/// candidate contributes its first absorbing set that is disjoint from the
/// family, until the budget is reached.
pub fn build_absorbing_family(
    g: &ThreeGraph,
    profile: &DegreeProfile,
    budget: Option<usize>,
    seed: u64,
    force: bool,
) -> Result<BuildOutcome, AbsorbError> {
    let satisfied = crate::degree::satisfies_profile(g, profile);
    match satisfied {
        Ok(check) if check.satisfied => {}
        Ok(check) if !force => {
            return Err(AbsorbError::ProfileViolated(format!("{:?}", check.first_violation)))
        }
        Err(e) if !force => return Err(AbsorbError::ProfileViolated(e.to_string())),
        _ => {}
    }
    let classes = classify(g, profile.gamma);
    let budget = budget.unwrap_or_else(|| default_budget(profile.gamma, g.n()));

    let mut candidates: Vec<Triple> = Vec::new();
    for a in 0..g.n() {
        for b in a + 1..g.n() {
            for c in b + 1..g.n() {
                let t = Triple::new(a, b, c).expect("distinct");
                let bigs = t.vertices().iter().filter(|&&v| classes.is_big(v)).count();
                if bigs >= 2 {
                    candidates.push(t);
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = candidates.clone();
    shuffled.shuffle(&mut rng);

    let mut family = AbsorbingFamily::default();
    for t in &shuffled {
        if family.len() >= budget {
            break;
        }
        // a fresh set needs six vertices outside the family and t
        let blocked = family.len() * 6
            + t.vertices().iter().filter(|&&v| !family.covered_vertices().contains(&v)).count();
        if g.n() < blocked + 6 {
            continue;
        }
        let already = family.entries.iter().any(|e| {
            e.set.disjoint_from_triple(t)
                && is_absorbing_set(g, &e.set, t).expect("family sets avoid t")
        });
        if already {
            continue;
        }
        let mut fresh = None;
        visit_absorbing_sets(g, &classes, t, |s| {
            if family.entries.iter().all(|e| e.set.disjoint_from_set(&s)) {
                fresh = Some(s);
                true
            } else {
                false
            }
        });
        if let Some(set) = fresh {
            let base = perfect_matching_within(g, &set.vertex_set())
                .expect("absorbing sets have an internal matching");
            family.entries.push(FamilyEntry { set, base: [base[0], base[1]] });
        }
    }

    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    let mut uncovered = 0;
    for t in &candidates {
        let cover = family
            .entries
            .iter()
            .filter(|e| {
                e.set.disjoint_from_triple(t)
                    && is_absorbing_set(g, &e.set, t).unwrap_or(false)
            })
            .count();
        *histogram.entry(cover).or_insert(0) += 1;
        if cover == 0 {
            uncovered += 1;
        }
    }

    Ok(BuildOutcome {
        family,
        budget,
        candidate_triples: candidates.len(),
        coverage_histogram: histogram,
        uncovered,
    })
}

/// Result of absorbing a leftover set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Absorption {
    /// Matching covering exactly the family vertices plus `W`.
    pub matching: Vec<Triple>,
    /// Which family entry absorbed which triple of the `W`-partition.
    pub assignments: Vec<(Triple, usize)>,
}

/// Absorbs `w` into the family: partitions `w` into triples with two Big
/// vertices each (Big vertices paired ascending, thirds ascending non-Big
/// first), matches every triple to an unused absorbing set, and replaces that
/// set's 2-edge matching by the 3-edge matching on set ∪ triple.
pub fn absorb(
    g: &ThreeGraph,
    fam: &AbsorbingFamily,
    w: &VertexSet,
    classes: &ClassMap,
) -> Result<Absorption, AbsorbError> {
    if w.len() % 3 != 0 {
        return Err(AbsorbError::WNotDivisible(w.len()));
    }
    let fam_vertices = fam.covered_vertices();
    if let Some(&v) = w.iter().find(|v| fam_vertices.contains(v)) {
        return Err(AbsorbError::WIntersectsFamily(v));
    }
    let bigs: Vec<Vertex> = w.iter().copied().filter(|&v| classes.is_big(v)).collect();
    if 3 * bigs.len() < 2 * w.len() {
        return Err(AbsorbError::WNotEnoughBig { big: bigs.len(), size: w.len() });
    }

    let k = w.len() / 3;
    let mut thirds: Vec<Vertex> = w.iter().copied().filter(|&v| !classes.is_big(v)).collect();
    thirds.extend(bigs.iter().copied().skip(2 * k));
    let triples: Vec<Triple> = (0..k)
        .map(|i| {
            Triple::new(bigs[2 * i], bigs[2 * i + 1], thirds[i])
                .expect("w vertices are distinct")
        })
        .collect();

    let mut used = vec![false; fam.len()];
    let mut assignments = Vec::with_capacity(k);
    let mut replacement: Vec<Option<Vec<Triple>>> = vec![None; fam.len()];
    for t in &triples {
        let mut placed = false;
        for (i, entry) in fam.entries.iter().enumerate() {
            if used[i] {
                continue;
            }
            let mut region = entry.set.vertex_set();
            region.extend(t.vertices());
            if let Some(pm) = perfect_matching_within(g, &region) {
                used[i] = true;
                replacement[i] = Some(pm);
                assignments.push((*t, i));
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(AbsorbError::Unabsorbable(*t));
        }
    }

    let mut matching = Vec::new();
    for (i, entry) in fam.entries.iter().enumerate() {
        match &replacement[i] {
            Some(pm) => matching.extend(pm.iter().copied()),
            None => matching.extend(entry.base),
        }
    }
    matching.sort_unstable();

    debug_assert_eq!(
        matching.iter().flat_map(|t| t.vertices()).collect::<VertexSet>(),
        fam_vertices.union(w).copied().collect::<VertexSet>()
    );
    Ok(Absorption { matching, assignments })
}
