//! Swap engine: relative vertex typing, the two pair-type partitions with
//! their tier tables, exhaustive swap certification, and the leave-improvement
//! loop that trades leave vertices upward (Small -> Medium -> Big).
//!
//! Tier guarantees are never transcribed as case analysis; `certify_swap`
//! searches all candidate swaps outright, and the tier tables are verified
//! exhaustively in the `verifier` module.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degree::{ClassMap, IndexMap, Rat, VertexClass};
use crate::graph::{edge_tuple_count, leave, ThreeGraph, Triple, TupleSystem, Vertex, VertexSet};
use crate::link::{pair_link, CrossPos, PairLink};
use crate::oracle;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SwapError {
    #[error("vertex {0} is not in the leave")]
    NotInLeave(Vertex),
    #[error("the two tuples must be distinct")]
    SameTuple,
    #[error("x and y must be distinct")]
    SameVertex,
}

// ---------------------------------------------------------------------------
// Vertex and tuple typing
// ---------------------------------------------------------------------------

/// Type of a tuple vertex relative to a reference leave vertex: a Small
/// vertex is `Little`/`Large` according to its degree rank versus the
/// reference; Medium and Big vertices are `NotSmall`. The derived order
/// `Little < Large < NotSmall` drives the dominance relation.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelType {
    Little,
    Large,
    NotSmall,
}

/// Sorted multiset of three relative types; exactly ten classes exist.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RelTripleType(pub [RelType; 3]);

impl RelTripleType {
    pub fn from_labels(mut labels: [RelType; 3]) -> Self {
        labels.sort_unstable();
        RelTripleType(labels)
    }

    /// Componentwise dominance of sorted label vectors.
    pub fn dominates(&self, other: &RelTripleType) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a >= b)
    }

    /// All ten classes in ascending lexicographic order.
    pub fn all() -> Vec<RelTripleType> {
        use RelType::*;
        let mut out = Vec::new();
        for a in [Little, Large, NotSmall] {
            for b in [Little, Large, NotSmall] {
                for c in [Little, Large, NotSmall] {
                    if a <= b && b <= c {
                        out.push(RelTripleType([a, b, c]));
                    }
                }
            }
        }
        out
    }

    pub fn name(&self) -> String {
        self.0
            .iter()
            .map(|t| match t {
                RelType::Little => 'l',
                RelType::Large => 'L',
                RelType::NotSmall => 'N',
            })
            .collect()
    }
}

/// Number of Big vertices in a tuple (0..=3); totally ordered.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BigCountType(pub u8);

impl BigCountType {
    pub fn all() -> [BigCountType; 4] {
        [BigCountType(0), BigCountType(1), BigCountType(2), BigCountType(3)]
    }

    pub fn name(&self) -> &'static str {
        match self.0 {
            0 => "bbb",
            1 => "bbB",
            2 => "bBB",
            _ => "BBB",
        }
    }
}

/// Relative type of tuple `e` with respect to leave vertex `x`.
pub fn rel_triple_type(
    im: &IndexMap,
    classes: &ClassMap,
    x: Vertex,
    e: &Triple,
) -> RelTripleType {
    let labels = e.vertices().map(|v| {
        debug_assert_ne!(v, x, "reference vertex cannot lie in the tuple");
        if classes.is_not_small(v) {
            RelType::NotSmall
        } else if im.rank(v) < im.rank(x) {
            RelType::Little
        } else {
            RelType::Large
        }
    });
    RelTripleType::from_labels(labels)
}

/// Big-count type of a tuple.
pub fn big_triple_type(classes: &ClassMap, e: &Triple) -> BigCountType {
    BigCountType(e.vertices().iter().filter(|&&v| classes.is_big(v)).count() as u8)
}

// ---------------------------------------------------------------------------
// Tier tables
// ---------------------------------------------------------------------------

fn pair_dominates_rel(
    pair: (RelTripleType, RelTripleType),
    gen: (RelTripleType, RelTripleType),
) -> bool {
    (pair.0.dominates(&gen.0) && pair.1.dominates(&gen.1))
        || (pair.0.dominates(&gen.1) && pair.1.dominates(&gen.0))
}

fn rel_tier_generators() -> [(u8, Vec<(RelTripleType, RelTripleType)>); 5] {
    use RelType::{Large as L, Little as I, NotSmall as N};
    let tt = |a, b, c| RelTripleType::from_labels([a, b, c]);
    [
        (4, vec![(tt(I, I, I), tt(N, N, N)), (tt(L, L, L), tt(L, L, L))]),
        (
            5,
            vec![
                (tt(I, I, N), tt(I, N, N)),
                (tt(I, I, L), tt(L, N, N)),
                (tt(I, L, N), tt(I, L, N)),
                (tt(I, L, L), tt(L, L, N)),
            ],
        ),
        (6, vec![(tt(I, I, N), tt(I, I, N)), (tt(I, I, L), tt(L, L, N))]),
        (
            7,
            vec![
                (tt(I, I, I), tt(I, I, N)),
                (tt(L, L, L), tt(I, I, L)),
                (tt(I, L, L), tt(I, L, L)),
            ],
        ),
        (8, vec![(tt(I, I, L), tt(I, I, L))]),
    ]
}

/// Tier of an unordered pair of relative types: the smallest tier whose
/// generator the pair dominates, or 10 when none applies. A pair at tier `i`
/// is guaranteed a swap once both link masks carry at least `i` edges.
pub fn rel_pair_tier(a: RelTripleType, b: RelTripleType) -> u8 {
    for (tier, gens) in rel_tier_generators() {
        if gens.iter().any(|&g| pair_dominates_rel((a, b), g)) {
            return tier;
        }
    }
    10
}

/// Tier of an unordered pair of big-count types; tiers {4,5,6,7} or 10.
pub fn big_pair_tier(a: BigCountType, b: BigCountType) -> u8 {
    const GENS: [(u8, (u8, u8)); 4] = [(4, (0, 3)), (5, (1, 2)), (6, (1, 1)), (7, (0, 1))];
    for (tier, (g0, g1)) in GENS {
        if (a.0 >= g0 && b.0 >= g1) || (a.0 >= g1 && b.0 >= g0) {
            return tier;
        }
    }
    10
}

// ---------------------------------------------------------------------------
// Swap search and certification
// ---------------------------------------------------------------------------

/// Finds two disjoint cross pairs, the first present in `lx`, the second in
/// `ly`. Exhaustive over the at most 81 ordered combinations; deterministic
/// (lowest bits first).
pub fn find_disjoint_pair(lx: u16, ly: u16) -> Option<(CrossPos, CrossPos)> {
    for a in 0..9 {
        if lx & (1 << a) == 0 {
            continue;
        }
        let pa = CrossPos::from_bit(a);
        for b in 0..9 {
            if ly & (1 << b) == 0 {
                continue;
            }
            let pb = CrossPos::from_bit(b);
            if pa.disjoint(&pb) {
                return Some((pa, pb));
            }
        }
    }
    None
}

/// Classification of the two vertices a swap releases into the leave, in
/// decreasing order of value.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SwapTag {
    /// Released pair contains a Big vertex.
    ContainsBig,
    /// Released pair contains a Medium (or Big) vertex.
    ContainsNotSmall,
    /// Both released vertices are Small with degree rank above both swap
    /// vertices.
    BothLarger,
}

/// A verified swap: two disjoint edges through `x` and `y`, each using one
/// vertex of `e` and one of `f`, plus the released pair and its tag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapCertificate {
    pub x: Vertex,
    pub y: Vertex,
    pub e: Triple,
    pub f: Triple,
    pub x_edge: Triple,
    pub y_edge: Triple,
    pub released: (Vertex, Vertex),
    pub tag: SwapTag,
}

impl SwapCertificate {
    /// Re-checks every invariant of the certificate against the graph,
    /// independent of how it was produced.
    pub fn verify(&self, g: &ThreeGraph, im: &IndexMap, classes: &ClassMap) -> bool {
        if !g.has_edge(&self.x_edge) || !g.has_edge(&self.y_edge) {
            return false;
        }
        if !self.x_edge.is_disjoint(&self.y_edge) {
            return false;
        }
        if !self.x_edge.contains(self.x) || !self.y_edge.contains(self.y) {
            return false;
        }
        let used_from = |edge: &Triple, t: &Triple| {
            edge.vertices().iter().filter(|v| t.contains(**v)).count()
        };
        if used_from(&self.x_edge, &self.e) != 1
            || used_from(&self.x_edge, &self.f) != 1
            || used_from(&self.y_edge, &self.e) != 1
            || used_from(&self.y_edge, &self.f) != 1
        {
            return false;
        }
        let (r0, r1) = self.released;
        let in_edges = |v: Vertex| self.x_edge.contains(v) || self.y_edge.contains(v);
        if in_edges(r0) || in_edges(r1) {
            return false;
        }
        let from_ef = |v: Vertex| self.e.contains(v) || self.f.contains(v);
        if !from_ef(r0) || !from_ef(r1) {
            return false;
        }
        match self.tag {
            SwapTag::ContainsBig => classes.is_big(r0) || classes.is_big(r1),
            SwapTag::ContainsNotSmall => classes.is_not_small(r0) || classes.is_not_small(r1),
            SwapTag::BothLarger => {
                let hi = im.rank(self.x).max(im.rank(self.y));
                [self.x, self.y, r0, r1].iter().all(|&v| classes.is_small(v))
                    && im.rank(r0) > hi
                    && im.rank(r1) > hi
            }
        }
    }
}

fn tag_for_release(
    im: &IndexMap,
    classes: &ClassMap,
    x: Vertex,
    y: Vertex,
    e3: Vertex,
    f3: Vertex,
) -> Option<SwapTag> {
    if classes.is_big(e3) || classes.is_big(f3) {
        return Some(SwapTag::ContainsBig);
    }
    if classes.is_not_small(e3) || classes.is_not_small(f3) {
        return Some(SwapTag::ContainsNotSmall);
    }
    let all_small = [x, y, e3, f3].iter().all(|&v| classes.is_small(v));
    let hi = im.rank(x).max(im.rank(y));
    if all_small && im.rank(e3) > hi && im.rank(f3) > hi {
        return Some(SwapTag::BothLarger);
    }
    None
}

/// Exhaustively searches the swaps of `{x,y}` against tuples `ei`, `fi` of
/// `m` and returns one achieving the strongest tag, or `None`.
#[allow(clippy::too_many_arguments)]
pub fn certify_swap(
    g: &ThreeGraph,
    m: &TupleSystem,
    im: &IndexMap,
    classes: &ClassMap,
    x: Vertex,
    y: Vertex,
    ei: usize,
    fi: usize,
) -> Result<Option<SwapCertificate>, SwapError> {
    if x == y {
        return Err(SwapError::SameVertex);
    }
    if ei == fi {
        return Err(SwapError::SameTuple);
    }
    if m.covers(x) {
        return Err(SwapError::NotInLeave(x));
    }
    if m.covers(y) {
        return Err(SwapError::NotInLeave(y));
    }
    let e = m.tuples()[ei];
    let f = m.tuples()[fi];
    let lx = pair_link(g, e, f, x).expect("leave vertex is outside both tuples");
    let ly = pair_link(g, e, f, y).expect("leave vertex is outside both tuples");
    Ok(best_swap(&lx, &ly, im, classes, x, y))
}

fn best_swap(
    lx: &PairLink,
    ly: &PairLink,
    im: &IndexMap,
    classes: &ClassMap,
    x: Vertex,
    y: Vertex,
) -> Option<SwapCertificate> {
    let e = lx.e;
    let f = lx.f;
    let ev = e.vertices();
    let fv = f.vertices();
    let mut best: Option<SwapCertificate> = None;
    for a in 0..9usize {
        if lx.mask & (1 << a) == 0 {
            continue;
        }
        let pa = CrossPos::from_bit(a);
        for b in 0..9usize {
            if ly.mask & (1 << b) == 0 {
                continue;
            }
            let pb = CrossPos::from_bit(b);
            if !pa.disjoint(&pb) {
                continue;
            }
            let e3 = ev[3 - pa.e_idx - pb.e_idx];
            let f3 = fv[3 - pa.f_idx - pb.f_idx];
            let Some(tag) = tag_for_release(im, classes, x, y, e3, f3) else {
                continue;
            };
            let better = match &best {
                None => true,
                Some(c) => tag < c.tag,
            };
            if better {
                let cert = SwapCertificate {
                    x,
                    y,
                    e,
                    f,
                    x_edge: lx.hyperedge(pa),
                    y_edge: ly.hyperedge(pb),
                    released: (e3, f3),
                    tag,
                };
                let done = tag == SwapTag::ContainsBig;
                best = Some(cert);
                if done {
                    return best;
                }
            }
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Leave improvement
// ---------------------------------------------------------------------------

/// Leave-quality potential, ordered lexicographically: Big count, Medium
/// count, then the rank sum of the Small leave vertices. Every accepted swap
/// strictly increases it, which bounds the improvement loop.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Phi {
    pub big: usize,
    pub medium: usize,
    pub small_rank_sum: u64,
}

pub fn phi(leave: &VertexSet, im: &IndexMap, classes: &ClassMap) -> Phi {
    let mut p = Phi { big: 0, medium: 0, small_rank_sum: 0 };
    for &v in leave {
        match classes.class(v) {
            VertexClass::Big => p.big += 1,
            VertexClass::Medium => p.medium += 1,
            VertexClass::Small => p.small_rank_sum += im.rank(v) as u64,
        }
    }
    p
}

/// Stopping condition for [`improve_leave`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LeaveTarget {
    /// Stop once the Big leave count strictly exceeds the threshold.
    BigCountExceeds(Rat),
    /// Stop once at least two thirds of the leave is Big.
    TwoThirdsBig,
}

impl LeaveTarget {
    fn met(&self, leave: &VertexSet, classes: &ClassMap) -> bool {
        let big = leave.iter().filter(|&&v| classes.is_big(v)).count();
        match self {
            LeaveTarget::BigCountExceeds(thr) => Rat::from_integer(big as i128) > *thr,
            LeaveTarget::TwoThirdsBig => 3 * big >= 2 * leave.len(),
        }
    }

    fn describe(&self) -> String {
        match self {
            LeaveTarget::BigCountExceeds(thr) => format!("big-in-leave > {}", thr),
            LeaveTarget::TwoThirdsBig => "big-in-leave >= 2/3 of leave".to_string(),
        }
    }
}

/// One accepted swap, with enough data to replay and audit it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapEvent {
    pub x: Vertex,
    pub y: Vertex,
    pub removed: (Triple, Triple),
    pub added: (Triple, Triple),
    pub released: (Vertex, Vertex),
    pub tag: SwapTag,
    pub phi_before: Phi,
    pub phi_after: Phi,
    pub edge_tuples_before: usize,
    pub edge_tuples_after: usize,
}

/// Machine-readable log of an improvement run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwapTrace {
    pub target: String,
    pub events: Vec<SwapEvent>,
    pub target_met: bool,
    /// True when the scan ran out of certified swaps before the target.
    pub exhausted: bool,
    pub final_phi: Phi,
}

/// Repeatedly applies the first certified swap under the deterministic scan
/// order (Small pairs by ascending rank sum, then Medium pairs, each against
/// tuple pairs by descending joint link count) until the target is met or no
/// certified swap remains. The tuple count and the number of tuples that are
/// real edges never decrease.
pub fn improve_leave(
    g: &ThreeGraph,
    m: &TupleSystem,
    im: &IndexMap,
    classes: &ClassMap,
    target: LeaveTarget,
) -> (TupleSystem, SwapTrace) {
    let mut m = m.clone();
    let mut trace = SwapTrace {
        target: target.describe(),
        events: Vec::new(),
        target_met: false,
        exhausted: false,
        final_phi: Phi { big: 0, medium: 0, small_rank_sum: 0 },
    };
    loop {
        let lv = leave(g, &m);
        trace.final_phi = phi(&lv, im, classes);
        if target.met(&lv, classes) {
            trace.target_met = true;
            return (m, trace);
        }
        match scan_for_swap(g, &m, im, classes, &lv) {
            Some(cert) => {
                let ei = m.tuple_of(cert.e.vertices()[0]).expect("tuple present");
                let fi = m.tuple_of(cert.f.vertices()[0]).expect("tuple present");
                let before = phi(&lv, im, classes);
                let edges_before = edge_tuple_count(g, &m);
                m.replace_pair(ei, fi, cert.x_edge, cert.y_edge);
                let after = phi(&leave(g, &m), im, classes);
                let edges_after = edge_tuple_count(g, &m);
                assert!(after > before, "accepted swap must raise the potential");
                assert!(edges_after >= edges_before, "edge tuples must not decrease");
                trace.events.push(SwapEvent {
                    x: cert.x,
                    y: cert.y,
                    removed: (cert.e, cert.f),
                    added: (cert.x_edge, cert.y_edge),
                    released: cert.released,
                    tag: cert.tag,
                    phi_before: before,
                    phi_after: after,
                    edge_tuples_before: edges_before,
                    edge_tuples_after: edges_after,
                });
            }
            None => {
                trace.exhausted = true;
                return (m, trace);
            }
        }
    }
}

/// Candidate `{x,y}` pairs from one class, ordered by ascending rank sum.
fn class_pairs(lv: &VertexSet, im: &IndexMap, classes: &ClassMap, class: VertexClass) -> Vec<(Vertex, Vertex)> {
    let members: Vec<Vertex> = lv.iter().copied().filter(|&v| classes.class(v) == class).collect();
    let mut pairs = Vec::new();
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            // x carries the larger rank
            let (x, y) = if im.rank(a) > im.rank(b) { (a, b) } else { (b, a) };
            pairs.push((x, y));
        }
    }
    pairs.sort_by_key(|&(x, y)| (im.rank(x) + im.rank(y), im.rank(y)));
    pairs
}

fn scan_for_swap(
    g: &ThreeGraph,
    m: &TupleSystem,
    im: &IndexMap,
    classes: &ClassMap,
    lv: &VertexSet,
) -> Option<SwapCertificate> {
    // Small x Small first: any tag upgrades the leave.
    for (x, y) in class_pairs(lv, im, classes, VertexClass::Small) {
        if let Some(cert) = scan_tuple_pairs(g, m, im, classes, x, y, true) {
            return Some(cert);
        }
    }
    // Medium x Medium: only a released Big makes progress.
    for (x, y) in class_pairs(lv, im, classes, VertexClass::Medium) {
        if let Some(cert) = scan_tuple_pairs(g, m, im, classes, x, y, false) {
            return Some(cert);
        }
    }
    None
}

fn scan_tuple_pairs(
    g: &ThreeGraph,
    m: &TupleSystem,
    im: &IndexMap,
    classes: &ClassMap,
    x: Vertex,
    y: Vertex,
    small_mode: bool,
) -> Option<SwapCertificate> {
    let k = m.len();
    if k < 2 {
        return None;
    }
    let mut candidates: Vec<(usize, usize, u32)> = Vec::with_capacity(k * (k - 1) / 2);
    for ei in 0..k {
        for fi in ei + 1..k {
            let e = m.tuples()[ei];
            let f = m.tuples()[fi];
            let lx = pair_link(g, e, f, x).expect("x is in the leave");
            let ly = pair_link(g, e, f, y).expect("y is in the leave");
            candidates.push((ei, fi, lx.edge_count() + ly.edge_count()));
        }
    }
    candidates.sort_by_key(|&(ei, fi, joint)| (std::cmp::Reverse(joint), ei, fi));
    for (ei, fi, _) in candidates {
        if small_mode {
            // proceed only when both tuples type identically against x and y
            let e = &m.tuples()[ei];
            let f = &m.tuples()[fi];
            if rel_triple_type(im, classes, x, e) != rel_triple_type(im, classes, y, e)
                || rel_triple_type(im, classes, x, f) != rel_triple_type(im, classes, y, f)
            {
                continue;
            }
        }
        let cert = certify_swap(g, m, im, classes, x, y, ei, fi)
            .expect("scan preconditions hold")
            .filter(|c| small_mode || c.tag == SwapTag::ContainsBig);
        if let Some(cert) = cert {
            debug_assert!(cert.verify(g, im, classes));
            return Some(cert);
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Diagnostics: per-type good-pair counts
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelRow {
    pub types: (RelTripleType, RelTripleType),
    pub tier: u8,
    pub pairs: usize,
    /// Pairs whose link mask for the reference vertex has >= tier edges.
    pub good: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BigRow {
    pub types: (BigCountType, BigCountType),
    pub tier: u8,
    pub pairs: usize,
    pub good: usize,
}

/// Exact per-type counts of tuple pairs and of "good" pairs (link count at
/// least the tier) for one leave vertex. Diagnostic only: no lower bound is
/// asserted at small scale.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodPairTable {
    pub rel_rows: Vec<RelRow>,
    pub big_rows: Vec<BigRow>,
    pub total_pairs: usize,
}

pub fn count_good_pairs(
    g: &ThreeGraph,
    m: &TupleSystem,
    im: &IndexMap,
    classes: &ClassMap,
    x: Vertex,
) -> GoodPairTable {
    assert!(!m.covers(x), "x must lie in the leave");
    use std::collections::BTreeMap;
    let mut rel: BTreeMap<(RelTripleType, RelTripleType), (usize, usize)> = BTreeMap::new();
    let mut big: BTreeMap<(BigCountType, BigCountType), (usize, usize)> = BTreeMap::new();
    let k = m.len();
    let mut total = 0;
    for ei in 0..k {
        for fi in ei + 1..k {
            total += 1;
            let e = m.tuples()[ei];
            let f = m.tuples()[fi];
            let link = pair_link(g, e, f, x).expect("x is in the leave").edge_count();

            let te = rel_triple_type(im, classes, x, &e);
            let tf = rel_triple_type(im, classes, x, &f);
            let key = (te.min(tf), te.max(tf));
            let tier = rel_pair_tier(key.0, key.1);
            let entry = rel.entry(key).or_insert((0, 0));
            entry.0 += 1;
            if tier <= 9 && link >= tier as u32 {
                entry.1 += 1;
            }

            let be = big_triple_type(classes, &e);
            let bf = big_triple_type(classes, &f);
            let key = (be.min(bf), be.max(bf));
            let tier = big_pair_tier(key.0, key.1);
            let entry = big.entry(key).or_insert((0, 0));
            entry.0 += 1;
            if tier <= 9 && link >= tier as u32 {
                entry.1 += 1;
            }
        }
    }
    GoodPairTable {
        rel_rows: rel
            .into_iter()
            .map(|(types, (pairs, good))| RelRow {
                types,
                tier: rel_pair_tier(types.0, types.1),
                pairs,
                good,
            })
            .collect(),
        big_rows: big
            .into_iter()
            .map(|(types, (pairs, good))| BigRow {
                types,
                tier: big_pair_tier(types.0, types.1),
                pairs,
                good,
            })
            .collect(),
        total_pairs: total,
    }
}

// ---------------------------------------------------------------------------
// Matching extension and fixed-size padding
// ---------------------------------------------------------------------------

/// Tries to produce a matching one edge larger than `m`:
/// (a) an edge wholly inside the leave; (b) replacing a tuple pair of `m`
/// with three disjoint edges on those six vertices plus three leave vertices;
/// (c) an exact-search fallback when `n` is within the oracle limit.
pub fn extend_matching(
    g: &ThreeGraph,
    m: &TupleSystem,
    classes: &ClassMap,
    oracle_limit: usize,
) -> Option<TupleSystem> {
    let lv = leave(g, m);

    for e in g.edges() {
        if e.vertices().iter().all(|v| lv.contains(v)) {
            let mut bigger = m.clone();
            bigger.push(*e).expect("leave edge is disjoint from the matching");
            return Some(bigger);
        }
    }

    // Big leave vertices have the richest links; try them first.
    let mut seeds: Vec<Vertex> = lv.iter().copied().collect();
    seeds.sort_by_key(|&v| (std::cmp::Reverse(classes.class(v)), v));
    let others: Vec<Vertex> = lv.iter().copied().collect();
    for &v in &seeds {
        for ei in 0..m.len() {
            for fi in ei + 1..m.len() {
                for (i, &u) in others.iter().enumerate() {
                    if u == v {
                        continue;
                    }
                    for &w in &others[i + 1..] {
                        if w == v {
                            continue;
                        }
                        let mut region: VertexSet = [v, u, w].into_iter().collect();
                        region.extend(m.tuples()[ei].vertices());
                        region.extend(m.tuples()[fi].vertices());
                        if let Some(pm) = oracle::perfect_matching_within(g, &region) {
                            let mut tuples: Vec<Triple> = m
                                .tuples()
                                .iter()
                                .enumerate()
                                .filter(|(i, _)| *i != ei && *i != fi)
                                .map(|(_, t)| *t)
                                .collect();
                            tuples.extend(pm);
                            return Some(TupleSystem::new(tuples).expect("replacement is disjoint"));
                        }
                    }
                }
            }
        }
    }

    if g.n() <= oracle_limit {
        let cfg = oracle::OracleConfig { limit: oracle_limit, ..Default::default() };
        if let Ok(res) = oracle::max_matching_size(g, &cfg) {
            if let (Some(size), Some(witness)) = (res.max_size, res.witness) {
                if size > m.len() {
                    let tuples = witness[..m.len() + 1].to_vec();
                    return Some(TupleSystem::new(tuples).expect("oracle witness is disjoint"));
                }
            }
        }
    }
    None
}

/// Pads or trims `m` to exactly `target` disjoint tuples. Padding tuples are
/// taken from the leave, Small vertices first, then Medium, then Big, each in
/// ascending id order; trimming drops tuples from the tail.
pub fn pad_to_size(
    g: &ThreeGraph,
    m: &TupleSystem,
    classes: &ClassMap,
    target: usize,
) -> TupleSystem {
    let mut out = m.clone();
    if out.len() >= target {
        out.truncate(target);
        return out;
    }
    let lv = leave(g, &out);
    let mut pool: Vec<Vertex> = lv.iter().copied().collect();
    pool.sort_by_key(|&v| (classes.class(v), v));
    let mut it = pool.chunks_exact(3);
    for chunk in &mut it {
        if out.len() == target {
            break;
        }
        let t = Triple::new(chunk[0], chunk[1], chunk[2]).expect("leave vertices are distinct");
        out.push(t).expect("padding stays disjoint");
    }
    assert_eq!(out.len(), target, "not enough leave vertices to pad");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::{classify, index_map, rat};
    use crate::forge;
    use crate::link::cross_bit;

    fn t3(a: usize, b: usize, c: usize) -> Triple {
        Triple::new(a, b, c).unwrap()
    }

    #[test]
    fn class_counts_are_ten_and_four() {
        assert_eq!(RelTripleType::all().len(), 10);
        assert_eq!(BigCountType::all().len(), 4);
    }

    #[test]
    fn triple_typing() {
        use crate::degree::{ClassMap, VertexClass};
        // degrees (5,3,3,4,3,3): rank order [1,2,4,5,3,0]
        let g = ThreeGraph::from_raw_edges(
            6,
            [
                [0, 1, 2],
                [0, 1, 3],
                [0, 2, 4],
                [0, 3, 4],
                [0, 3, 5],
                [1, 4, 5],
                [2, 3, 5],
            ],
        )
        .unwrap();
        let im = index_map(&g);
        assert_eq!(im.order(), &[1, 2, 4, 5, 3, 0]);
        let mut classes = vec![VertexClass::Small; 6];
        classes[0] = VertexClass::Medium;
        classes[3] = VertexClass::Big;
        let classes = ClassMap::from_vec(classes);

        use RelType::{Large as L, Little as I, NotSmall as N};
        let x = 4; // Small, rank 3
        // ranks: 1 -> 1, 2 -> 2 (little); 5 -> 4 (large); 0, 3 not small
        assert_eq!(
            rel_triple_type(&im, &classes, x, &t3(1, 2, 5)),
            RelTripleType::from_labels([I, I, L])
        );
        assert_eq!(
            rel_triple_type(&im, &classes, x, &t3(0, 3, 5)),
            RelTripleType::from_labels([N, N, L])
        );
        assert_eq!(big_triple_type(&classes, &t3(1, 2, 5)), BigCountType(0));
        assert_eq!(big_triple_type(&classes, &t3(0, 3, 5)), BigCountType(1));
        assert_eq!(big_triple_type(&classes, &t3(1, 3, 5)), BigCountType(1));
    }

    #[test]
    fn tier_examples() {
        use RelType::{Large as L, Little as I, NotSmall as N};
        let tt = |a, b, c| RelTripleType::from_labels([a, b, c]);
        assert_eq!(rel_pair_tier(tt(I, I, I), tt(N, N, N)), 4);
        assert_eq!(rel_pair_tier(tt(N, N, N), tt(N, N, N)), 4);
        assert_eq!(rel_pair_tier(tt(I, I, I), tt(I, I, I)), 10);
        assert_eq!(rel_pair_tier(tt(I, I, N), tt(I, N, N)), 5);
        assert_eq!(rel_pair_tier(tt(I, I, N), tt(I, I, N)), 6);
        assert_eq!(rel_pair_tier(tt(I, I, I), tt(I, I, N)), 7);
        assert_eq!(rel_pair_tier(tt(I, I, L), tt(I, I, L)), 8);

        assert_eq!(big_pair_tier(BigCountType(0), BigCountType(3)), 4);
        assert_eq!(big_pair_tier(BigCountType(2), BigCountType(2)), 5);
        assert_eq!(big_pair_tier(BigCountType(0), BigCountType(0)), 10);
        assert_eq!(big_pair_tier(BigCountType(0), BigCountType(1)), 7);
    }

    #[test]
    fn disjoint_pair_search() {
        assert!(find_disjoint_pair(0x1FF, 0x1FF).is_some());
        // fan at (0,0): row 0 plus column 0; five edges
        let fan = cross_bit(0, 0) | cross_bit(0, 1) | cross_bit(0, 2) | cross_bit(1, 0) | cross_bit(2, 0);
        let (a, b) = find_disjoint_pair(fan, fan).unwrap();
        assert!(a.disjoint(&b));
        // star at e_0 only: all three edges share e_0, no disjoint pair
        let star = cross_bit(0, 0) | cross_bit(0, 1) | cross_bit(0, 2);
        assert!(find_disjoint_pair(star, star).is_none());
        // explicit example
        let lx = cross_bit(0, 0) | cross_bit(0, 1) | cross_bit(0, 2) | cross_bit(1, 0);
        let ly = cross_bit(1, 1) | cross_bit(2, 1) | cross_bit(1, 2) | cross_bit(2, 2);
        let (a, b) = find_disjoint_pair(lx, ly).unwrap();
        assert_eq!((a.e_idx, a.f_idx), (0, 0));
        assert_eq!((b.e_idx, b.f_idx), (1, 1));
    }

    #[test]
    fn certify_on_complete_graph_releases_big() {
        let g = ThreeGraph::complete(9);
        let im = index_map(&g);
        let classes = classify(&g, rat(1, 100)); // everything Big
        let m = TupleSystem::new(vec![t3(0, 1, 2), t3(3, 4, 5)]).unwrap();
        let cert = certify_swap(&g, &m, &im, &classes, 7, 8, 0, 1).unwrap().unwrap();
        assert_eq!(cert.tag, SwapTag::ContainsBig);
        assert!(cert.verify(&g, &im, &classes));
    }

    #[test]
    fn certify_error_paths() {
        let g = ThreeGraph::complete(9);
        let im = index_map(&g);
        let classes = classify(&g, rat(1, 100));
        let m = TupleSystem::new(vec![t3(0, 1, 2), t3(3, 4, 5)]).unwrap();
        assert_eq!(
            certify_swap(&g, &m, &im, &classes, 0, 8, 0, 1).unwrap_err(),
            SwapError::NotInLeave(0)
        );
        assert_eq!(
            certify_swap(&g, &m, &im, &classes, 7, 8, 1, 1).unwrap_err(),
            SwapError::SameTuple
        );
        assert_eq!(
            certify_swap(&g, &m, &im, &classes, 7, 7, 0, 1).unwrap_err(),
            SwapError::SameVertex
        );
    }

    #[test]
    fn certify_none_when_links_are_stars() {
        // Only x- and y-edges through e_0 = vertex 0: no two disjoint swaps.
        let g = ThreeGraph::from_raw_edges(
            8,
            [[6, 0, 3], [6, 0, 4], [6, 0, 5], [7, 0, 3], [7, 0, 4], [7, 0, 5]],
        )
        .unwrap();
        let im = index_map(&g);
        let classes = classify(&g, rat(1, 100));
        let m = TupleSystem::new(vec![t3(0, 1, 2), t3(3, 4, 5)]).unwrap();
        assert!(certify_swap(&g, &m, &im, &classes, 6, 7, 0, 1).unwrap().is_none());
    }

    #[test]
    fn improve_leave_trivial_when_target_met() {
        let g = ThreeGraph::complete(9);
        let im = index_map(&g);
        let classes = classify(&g, rat(1, 100));
        let m = TupleSystem::new(vec![t3(0, 1, 2), t3(3, 4, 5)]).unwrap();
        let (m2, trace) = improve_leave(&g, &m, &im, &classes, LeaveTarget::TwoThirdsBig);
        assert_eq!(m2, m);
        assert!(trace.target_met);
        assert!(trace.events.is_empty());
    }

    #[test]
    fn improve_leave_on_empty_system() {
        // nothing to swap against; the loop must exit cleanly
        let g = ThreeGraph::new(6, Vec::new()).unwrap();
        let im = index_map(&g);
        let classes = classify(&g, rat(1, 100));
        let (m2, trace) =
            improve_leave(&g, &TupleSystem::empty(), &im, &classes, LeaveTarget::TwoThirdsBig);
        assert!(m2.is_empty());
        assert!(trace.exhausted);
    }

    #[test]
    fn improve_leave_exhausts_on_empty_graph() {
        let g = ThreeGraph::new(9, Vec::new()).unwrap();
        let im = index_map(&g);
        let classes = classify(&g, rat(1, 100));
        let m = TupleSystem::new(vec![t3(0, 1, 2), t3(3, 4, 5)]).unwrap();
        let (m2, trace) = improve_leave(&g, &m, &im, &classes, LeaveTarget::TwoThirdsBig);
        assert_eq!(m2, m);
        assert!(trace.exhausted);
        assert!(!trace.target_met);
    }

    #[test]
    fn improve_leave_forced_two_swap_trace() {
        // Hand-built 12-vertex instance: the only available swap trades the
        // lowest Smalls for two larger-ranked Smalls, which then enables a
        // second swap releasing the unique Big vertex.
        let g = ThreeGraph::from_raw_edges(
            12,
            [
                [0, 3, 6],
                [1, 4, 7],
                [1, 3, 8],
                [4, 6, 9],
                [0, 2, 5],
                [1, 2, 5],
                [2, 3, 5],
                [2, 4, 5],
            ],
        )
        .unwrap();
        let im = index_map(&g);
        let mut classes = vec![crate::degree::VertexClass::Small; 12];
        classes[0] = crate::degree::VertexClass::Big;
        let classes = crate::degree::ClassMap::from_vec(classes);
        let m = TupleSystem::new(vec![t3(0, 1, 2), t3(3, 4, 5)]).unwrap();

        let (improved, trace) = improve_leave(&g, &m, &im, &classes, LeaveTarget::TwoThirdsBig);
        assert_eq!(trace.events.len(), 2);
        assert_eq!(trace.events[0].tag, SwapTag::BothLarger);
        assert_eq!(trace.events[1].tag, SwapTag::ContainsBig);
        assert!(trace.exhausted && !trace.target_met);
        // Big-in-leave rises from 0 to 1 across the trace
        assert_eq!(trace.events[0].phi_before.big, 0);
        assert_eq!(trace.events[1].phi_after.big, 1);
        for ev in &trace.events {
            assert!(ev.phi_after > ev.phi_before);
            assert!(ev.edge_tuples_after >= ev.edge_tuples_before);
            // replay each certificate through the independent checker
            let cert = SwapCertificate {
                x: ev.x,
                y: ev.y,
                e: ev.removed.0,
                f: ev.removed.1,
                x_edge: ev.added.0,
                y_edge: ev.added.1,
                released: ev.released,
                tag: ev.tag,
            };
            assert!(cert.verify(&g, &im, &classes));
        }
        // the padded system became a genuine matching of the same size
        assert_eq!(improved.len(), 2);
        assert!(crate::graph::is_matching(&g, &improved));
    }

    #[test]
    fn good_pair_totals_partition() {
        let g = forge::gen_planted_profile(12, rat(1, 10), 1, 3).unwrap();
        let im = index_map(&g);
        let classes = classify(&g, rat(1, 10));
        let m = TupleSystem::new(vec![t3(0, 1, 2), t3(3, 4, 5), t3(6, 7, 8)]).unwrap();
        let table = count_good_pairs(&g, &m, &im, &classes, 9);
        assert_eq!(table.total_pairs, 3);
        assert_eq!(table.rel_rows.iter().map(|r| r.pairs).sum::<usize>(), 3);
        assert_eq!(table.big_rows.iter().map(|r| r.pairs).sum::<usize>(), 3);
    }

    #[test]
    fn good_pairs_single_pair_and_empty_links() {
        let g = ThreeGraph::new(9, Vec::new()).unwrap();
        let im = index_map(&g);
        let classes = classify(&g, rat(1, 100));
        let m = TupleSystem::new(vec![t3(0, 1, 2), t3(3, 4, 5)]).unwrap();
        let table = count_good_pairs(&g, &m, &im, &classes, 6);
        assert_eq!(table.total_pairs, 1);
        assert_eq!(table.rel_rows.len(), 1);
        // no edges anywhere, so nothing is good
        assert!(table.rel_rows.iter().all(|r| r.good == 0));
        assert!(table.big_rows.iter().all(|r| r.good == 0));
    }

    #[test]
    fn good_pairs_complete_graph_all_good() {
        let g = ThreeGraph::complete(12);
        let im = index_map(&g);
        let classes = classify(&g, rat(1, 100));
        let m = TupleSystem::new(vec![t3(0, 1, 2), t3(3, 4, 5), t3(6, 7, 8)]).unwrap();
        let table = count_good_pairs(&g, &m, &im, &classes, 9);
        for row in &table.big_rows {
            assert_eq!(row.tier, 4); // all-Big tuples
            assert_eq!(row.good, row.pairs); // 9 link edges everywhere
        }
    }

    #[test]
    fn extend_via_leave_edge_and_complete() {
        let g = ThreeGraph::complete(9);
        let classes = classify(&g, rat(1, 100));
        let m = TupleSystem::new(vec![t3(0, 1, 2)]).unwrap();
        let bigger = extend_matching(&g, &m, &classes, 30).unwrap();
        assert_eq!(bigger.len(), 2);
        assert!(crate::graph::is_matching(&g, &bigger));
    }

    #[test]
    fn extend_fails_on_maximum_matching() {
        let g = forge::gen_space_barrier(12).unwrap();
        let classes = classify(&g, rat(1, 100));
        // saturate the sparse side: 3 edges, each with one vertex of {0..4}
        let m = TupleSystem::new(vec![t3(0, 5, 6), t3(1, 7, 8), t3(2, 9, 10)]).unwrap();
        assert!(crate::graph::is_matching(&g, &m));
        assert!(extend_matching(&g, &m, &classes, 30).is_none());
    }

    #[test]
    fn padding_is_small_first_and_trims_from_tail() {
        let g = forge::gen_space_barrier(12).unwrap();
        let classes = classify(&g, rat(1, 100));
        let m = TupleSystem::new(vec![t3(0, 5, 6)]).unwrap();
        let padded = pad_to_size(&g, &m, &classes, 3);
        assert_eq!(padded.len(), 3);
        assert_eq!(padded.tuples()[0], t3(0, 5, 6));
        // Small vertices (the low-degree side 0..=4 minus 0) pad first.
        assert_eq!(padded.tuples()[1], t3(1, 2, 3));

        let trimmed = pad_to_size(&g, &padded, &classes, 2);
        assert_eq!(trimmed.tuples(), &padded.tuples()[..2]);
    }
}
