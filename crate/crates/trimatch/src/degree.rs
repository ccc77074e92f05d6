//! Degree-sequence machinery: exact-rational threshold curves, the
//! degree-rank bijection, and the Big/Medium/Small vertex classes.
//!
//! Every accept/reject comparison here is exact integer arithmetic on
//! rationals; no floating point is involved anywhere in a decision.

use std::fmt;

use num::rational::Ratio;
use num::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{ThreeGraph, Vertex};

/// Exact rational scalar. `i128` leaves ample headroom for the eighth powers
/// of gamma that the pipeline stage constants need.
pub type Rat = Ratio<i128>;

pub fn rat(p: i128, q: i128) -> Rat {
    Ratio::new(p, q)
}

/// `C(n,2)` as an exact integer.
pub fn choose2(n: usize) -> i128 {
    let n = n as i128;
    n * (n - 1) / 2
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DegreeError {
    #[error("gamma must be a positive rational literal \"p/q\", got {0:?}")]
    BadGamma(String),
    #[error("step count t={t} invalid for kind {kind:?} at n={n}")]
    InvalidStep { kind: ProfileKind, t: usize, n: usize },
    #[error("malformed profile string {0:?}")]
    BadProfileString(String),
}

/// Parses a strict rational literal `p/q` with `q > 0`.
pub fn parse_rat(s: &str) -> Result<Rat, DegreeError> {
    let (p, q) = s
        .split_once('/')
        .ok_or_else(|| DegreeError::BadGamma(s.to_string()))?;
    let p: i128 = p.trim().parse().map_err(|_| DegreeError::BadGamma(s.to_string()))?;
    let q: i128 = q.trim().parse().map_err(|_| DegreeError::BadGamma(s.to_string()))?;
    if q <= 0 {
        return Err(DegreeError::BadGamma(s.to_string()));
    }
    Ok(Ratio::new(p, q))
}

/// Which threshold curve a profile encodes.
///
/// * `Main`: stepped first band `(1/3+g)C(n,2) + i*t`, then `(4/9+g)`,
///   then `(5/9+g)`.
/// * `Almost`: same shape with `4g` in place of `g`.
/// * `Absorbing`: flat `(1/3+g)` first band, `(4/9+g)` middle band, and a
///   flat `5/9` top band with no gamma slack.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    Main,
    Almost,
    Absorbing,
}

/// A degree-sequence profile: gamma, step count, and curve kind.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub kind: ProfileKind,
    pub gamma: Rat,
    pub t: usize,
}

impl DegreeProfile {
    pub fn new(kind: ProfileKind, gamma: Rat, t: usize) -> Result<Self, DegreeError> {
        if gamma <= Rat::zero() {
            return Err(DegreeError::BadGamma(gamma.to_string()));
        }
        Ok(DegreeProfile { kind, gamma, t })
    }

    /// Step-count admissibility, evaluated by integer squaring:
    /// Main/Absorbing need `t <= (1 - sqrt(2/3)) n`, i.e. `3(n-t)^2 >= 2n^2`;
    /// Almost needs `t <= n / (3 sqrt 2)`, i.e. `18 t^2 <= n^2`.
    pub fn validate(&self, n: usize) -> Result<(), DegreeError> {
        let t = self.t as i128;
        let n_i = n as i128;
        let ok = match self.kind {
            ProfileKind::Main | ProfileKind::Absorbing => {
                self.t <= n && 3 * (n_i - t) * (n_i - t) >= 2 * n_i * n_i
            }
            ProfileKind::Almost => 18 * t * t <= n_i * n_i,
        };
        if ok {
            Ok(())
        } else {
            Err(DegreeError::InvalidStep { kind: self.kind, t: self.t, n })
        }
    }

    /// Parses strings of the form `main:gamma=1/100,t=3`.
    pub fn parse(s: &str) -> Result<Self, DegreeError> {
        let bad = || DegreeError::BadProfileString(s.to_string());
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let kind = match kind.trim() {
            "main" => ProfileKind::Main,
            "almost" => ProfileKind::Almost,
            "absorbing" => ProfileKind::Absorbing,
            _ => return Err(bad()),
        };
        let mut gamma = None;
        let mut t = None;
        for part in rest.split(',') {
            let (key, value) = part.split_once('=').ok_or_else(bad)?;
            match key.trim() {
                "gamma" => gamma = Some(parse_rat(value.trim())?),
                "t" => t = Some(value.trim().parse::<usize>().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        DegreeProfile::new(kind, gamma.ok_or_else(bad)?, t.ok_or_else(bad)?)
    }
}

impl fmt::Display for DegreeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ProfileKind::Main => "main",
            ProfileKind::Almost => "almost",
            ProfileKind::Absorbing => "absorbing",
        };
        write!(f, "{}:gamma={},t={}", kind, self.gamma, self.t)
    }
}

/// The curve value at a 1-based rank. Rank 1 is evaluated against the `i=1`
/// band-one value for every kind (the stricter of the two band conventions),
/// and the first band covers ranks `1..=t`.
pub fn threshold_value(kind: ProfileKind, n: usize, gamma: Rat, t: usize, rank: usize) -> Rat {
    assert!(rank >= 1 && rank <= n, "rank {} out of 1..={}", rank, n);
    let pairs = Rat::from_integer(choose2(n));
    let g = match kind {
        ProfileKind::Main | ProfileKind::Absorbing => gamma,
        ProfileKind::Almost => gamma * Rat::from_integer(4),
    };
    if rank <= t {
        let base = (rat(1, 3) + g) * pairs;
        match kind {
            ProfileKind::Absorbing => base,
            _ => base + Rat::from_integer((rank * t) as i128),
        }
    } else if 3 * rank <= n {
        (rat(4, 9) + g) * pairs
    } else {
        match kind {
            ProfileKind::Absorbing => rat(5, 9) * pairs,
            _ => (rat(5, 9) + g) * pairs,
        }
    }
}

/// Degree-rank bijection: ranks `1..=n` sorted by `(degree, vertex id)`
/// ascending, so `d_1 <= ... <= d_n` with deterministic tie-breaking.
#[derive(Clone, Debug)]
pub struct IndexMap {
    order: Vec<Vertex>,
    rank_of: Vec<usize>,
    degrees: Vec<usize>,
}

impl IndexMap {
    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// Vertices in rank order (rank 1 first).
    pub fn order(&self) -> &[Vertex] {
        &self.order
    }

    /// 1-based rank of `v`.
    pub fn rank(&self, v: Vertex) -> usize {
        self.rank_of[v]
    }

    pub fn vertex_at_rank(&self, rank: usize) -> Vertex {
        self.order[rank - 1]
    }

    /// `d_rank` for a 1-based rank.
    pub fn degree_at_rank(&self, rank: usize) -> usize {
        self.degrees[rank - 1]
    }
}

pub fn index_map(g: &ThreeGraph) -> IndexMap {
    let mut order: Vec<Vertex> = (0..g.n()).collect();
    order.sort_by_key(|&v| (g.degree(v), v));
    let mut rank_of = vec![0usize; g.n()];
    for (i, &v) in order.iter().enumerate() {
        rank_of[v] = i + 1;
    }
    let degrees = order.iter().map(|&v| g.degree(v)).collect();
    IndexMap { order, rank_of, degrees }
}

/// Degree class of a vertex.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VertexClass {
    Small,
    Medium,
    Big,
}

/// Per-vertex class assignment. Usually produced by [`classify`], but freely
/// constructible so callers can supply bespoke class maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassMap {
    classes: Vec<VertexClass>,
}

impl ClassMap {
    pub fn from_vec(classes: Vec<VertexClass>) -> Self {
        ClassMap { classes }
    }

    pub fn n(&self) -> usize {
        self.classes.len()
    }

    pub fn class(&self, v: Vertex) -> VertexClass {
        self.classes[v]
    }

    pub fn is_big(&self, v: Vertex) -> bool {
        self.classes[v] == VertexClass::Big
    }

    pub fn is_small(&self, v: Vertex) -> bool {
        self.classes[v] == VertexClass::Small
    }

    /// Not-small: Medium or Big.
    pub fn is_not_small(&self, v: Vertex) -> bool {
        self.classes[v] != VertexClass::Small
    }

    pub fn count(&self, class: VertexClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }
}

/// Class cutoffs at `(5/9+g)C(n,2)` (Big) and `(4/9+g)C(n,2)` (Medium).
pub fn classify(g: &ThreeGraph, gamma: Rat) -> ClassMap {
    let pairs = Rat::from_integer(choose2(g.n()));
    classify_with_cutoffs(g, (rat(4, 9) + gamma) * pairs, (rat(5, 9) + gamma) * pairs)
}

/// Class map with the relaxed Big cutoff `(5/9 - g/5)C(n,2)` used when
/// handing a leftover set to the absorbing family.
pub fn classify_relaxed_big(g: &ThreeGraph, gamma: Rat) -> ClassMap {
    let pairs = Rat::from_integer(choose2(g.n()));
    classify_with_cutoffs(
        g,
        (rat(4, 9) + gamma) * pairs,
        (rat(5, 9) - gamma / Rat::from_integer(5)) * pairs,
    )
}

/// Explicit cutoffs: Big iff `deg >= big_cutoff`, else Medium iff
/// `deg >= medium_cutoff`, else Small.
pub fn classify_with_cutoffs(g: &ThreeGraph, medium_cutoff: Rat, big_cutoff: Rat) -> ClassMap {
    let classes = (0..g.n())
        .map(|v| {
            let d = Rat::from_integer(g.degree(v) as i128);
            if d >= big_cutoff {
                VertexClass::Big
            } else if d >= medium_cutoff {
                VertexClass::Medium
            } else {
                VertexClass::Small
            }
        })
        .collect();
    ClassMap { classes }
}

/// Outcome of checking a degree sequence against a profile curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileCheck {
    pub satisfied: bool,
    /// First rank whose degree falls below the curve, with the offending
    /// degree and the exact required value (as a string, for reporting).
    pub first_violation: Option<ProfileViolation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileViolation {
    pub rank: usize,
    pub degree: usize,
    pub required: String,
}

/// Checks `d_i >= curve(i)` for every rank, reporting the first failure.
pub fn satisfies_profile(g: &ThreeGraph, p: &DegreeProfile) -> Result<ProfileCheck, DegreeError> {
    p.validate(g.n())?;
    let im = index_map(g);
    for rank in 1..=g.n() {
        let required = threshold_value(p.kind, g.n(), p.gamma, p.t, rank);
        let degree = im.degree_at_rank(rank);
        if Rat::from_integer(degree as i128) < required {
            return Ok(ProfileCheck {
                satisfied: false,
                first_violation: Some(ProfileViolation {
                    rank,
                    degree,
                    required: required.to_string(),
                }),
            });
        }
    }
    Ok(ProfileCheck { satisfied: true, first_violation: None })
}

/// Largest Almost-admissible step count for `n` (`max t` with `18t^2 <= n^2`).
pub fn max_almost_step(n: usize) -> usize {
    let n_i = (n * n) as i128;
    let mut t = 0i128;
    while 18 * (t + 1) * (t + 1) <= n_i {
        t += 1;
    }
    t as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge;
    use crate::graph::ThreeGraph;

    #[test]
    fn rat_parsing() {
        assert_eq!(parse_rat("1/100").unwrap(), rat(1, 100));
        assert_eq!(parse_rat("3/9").unwrap(), rat(1, 3));
        assert!(parse_rat("0.5").is_err());
        assert!(parse_rat("2").is_err());
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("1/-2").is_err());
    }

    #[test]
    fn profile_string_round_trip() {
        let p = DegreeProfile::parse("main:gamma=1/100,t=3").unwrap();
        assert_eq!(p.kind, ProfileKind::Main);
        assert_eq!(p.gamma, rat(1, 100));
        assert_eq!(p.t, 3);
        assert!(DegreeProfile::parse("main:gamma=1/100").is_err());
        assert!(DegreeProfile::parse("weird:gamma=1/2,t=0").is_err());
        assert!(DegreeProfile::parse("main:gamma=0/5,t=1").is_err());
    }

    #[test]
    fn step_validity_by_squaring() {
        // n=12: (1 - sqrt(2/3)) * 12 = 2.20..., so t <= 2 for Main.
        let main_ok = DegreeProfile::new(ProfileKind::Main, rat(1, 100), 2).unwrap();
        assert!(main_ok.validate(12).is_ok());
        let main_bad = DegreeProfile::new(ProfileKind::Main, rat(1, 100), 3).unwrap();
        assert!(main_bad.validate(12).is_err());
        // n=12: 12/(3 sqrt 2) = 2.82..., so t <= 2 for Almost.
        assert_eq!(max_almost_step(12), 2);
        let almost_bad = DegreeProfile::new(ProfileKind::Almost, rat(1, 100), 3).unwrap();
        assert!(almost_bad.validate(12).is_err());
    }

    #[test]
    fn threshold_examples() {
        // Main, n=12, gamma=1/100, t=2, rank=2: (1/3 + 1/100)*66 + 4
        let v = threshold_value(ProfileKind::Main, 12, rat(1, 100), 2, 2);
        assert_eq!(v, (rat(1, 3) + rat(1, 100)) * Rat::from_integer(66) + Rat::from_integer(4));
        // top band carries gamma for Main...
        let top = threshold_value(ProfileKind::Main, 12, rat(1, 100), 2, 5);
        assert_eq!(top, (rat(5, 9) + rat(1, 100)) * Rat::from_integer(66));
        // ...but is exactly 5/9 C(n,2) for Absorbing.
        let absorb_top = threshold_value(ProfileKind::Absorbing, 12, rat(1, 100), 2, 5);
        assert_eq!(absorb_top, rat(5, 9) * Rat::from_integer(66));
        // Absorbing first band has no step term.
        let absorb_low = threshold_value(ProfileKind::Absorbing, 12, rat(1, 100), 2, 2);
        assert_eq!(absorb_low, (rat(1, 3) + rat(1, 100)) * Rat::from_integer(66));
    }

    #[test]
    fn index_map_sorts_by_degree_then_id() {
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
        // degrees: 0 -> 5, 3 -> 4, and 1,2,4,5 -> 3; ties break by id
        assert_eq!(g.degree(0), 5);
        assert_eq!(g.degree(3), 4);
        let im = index_map(&g);
        assert_eq!(im.order(), &[1, 2, 4, 5, 3, 0]);
        assert_eq!(im.rank(1), 1);
        assert_eq!(im.rank(0), 6);
        assert_eq!(im.degree_at_rank(6), 5);
    }

    #[test]
    fn index_map_regular_graph_is_identity() {
        let im = index_map(&ThreeGraph::complete(7));
        assert_eq!(im.order(), &[0, 1, 2, 3, 4, 5, 6]);
        for v in 0..7 {
            assert_eq!(im.degree_at_rank(im.rank(v)), 15);
        }
    }

    #[test]
    fn parity_barrier_low_ranks() {
        let g = forge::gen_parity_barrier(9).unwrap();
        assert_eq!(g.degree(0), 12); // vertices 0..3 form the distinguished set
        assert_eq!(g.degree(3), 13);
        let im = index_map(&g);
        assert_eq!(&im.order()[..3], &[0, 1, 2][..]);
    }

    #[test]
    fn classify_complete_and_parity() {
        let k9 = ThreeGraph::complete(9);
        let classes = classify(&k9, rat(1, 100));
        assert!((0..9).all(|v| classes.is_big(v))); // 28 >= (5/9 + 1/100) * 36

        // parity barrier n=9: deg 12 and 13 both fall below
        // (4/9 + 1/100) * 36 = 16.36, so every vertex is Small.
        let g = forge::gen_parity_barrier(9).unwrap();
        let classes = classify(&g, rat(1, 100));
        assert!((0..9).all(|v| classes.is_small(v)));
    }

    #[test]
    fn classify_is_a_partition() {
        let g = forge::gen_space_barrier(12).unwrap();
        let classes = classify(&g, rat(1, 100));
        let total = classes.count(VertexClass::Small)
            + classes.count(VertexClass::Medium)
            + classes.count(VertexClass::Big);
        assert_eq!(total, 12);
    }

    #[test]
    fn profile_checks() {
        let k12 = ThreeGraph::complete(12);
        let p = DegreeProfile::new(ProfileKind::Main, rat(1, 100), 1).unwrap();
        assert!(satisfies_profile(&k12, &p).unwrap().satisfied);

        let space = forge::gen_space_barrier(12).unwrap();
        let check = satisfies_profile(&space, &p).unwrap();
        assert!(!check.satisfied);
        let viol = check.first_violation.unwrap();
        assert!(viol.rank <= 4, "violating rank {} should be <= n/3", viol.rank);

        let empty = ThreeGraph::new(12, Vec::new()).unwrap();
        let check = satisfies_profile(&empty, &p).unwrap();
        assert_eq!(check.first_violation.unwrap().rank, 1);
    }

    #[test]
    fn profile_monotone_in_gamma() {
        // satisfied at gamma implies satisfied at any smaller positive gamma
        let g = forge::gen_planted_profile(12, rat(1, 10), 1, 7).unwrap();
        let strong = DegreeProfile::new(ProfileKind::Main, rat(1, 10), 1).unwrap();
        assert!(satisfies_profile(&g, &strong).unwrap().satisfied);
        for q in [11, 20, 50, 1000] {
            let weak = DegreeProfile::new(ProfileKind::Main, rat(1, q), 1).unwrap();
            assert!(satisfies_profile(&g, &weak).unwrap().satisfied, "gamma=1/{}", q);
        }
    }

    #[test]
    fn oversized_almost_step_overshoots_middle_band() {
        // For t just past the bound, (1/3+4g)C(n,2) + t^2 exceeds the middle
        // band (4/9+4g)C(n,2); equivalently 18 t^2 > n(n-1). Pure integers.
        for n in 3..=60usize {
            let t = (max_almost_step(n) + 1) as i128;
            assert!(
                18 * t * t > (n as i128) * (n as i128 - 1),
                "n={} t={}",
                n,
                t
            );
        }
    }
}
