//! Exhaustive machine verification of the finite combinatorial claims behind
//! the swap machinery: the disjoint-pair fact for rich link masks, both
//! tier-table swap guarantees, the partition cardinalities, and the counting
//! inequality on the class-count lattice.
//!
//! Everything here is a plain enumeration; a nonempty counterexample list
//! means the corresponding claim is false as stated.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::swap::{big_pair_tier, find_disjoint_pair, rel_pair_tier, BigCountType, RelTripleType, RelType};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Counterexample {
    /// Mask pair on which no disjoint cross pair exists.
    MaskPair { lx: u16, ly: u16 },
    /// Labeled mask pair on which no qualifying swap exists. Labels are
    /// positional over the two triples, e.g. "llN".
    LabeledMaskPair { tier: u8, e_labels: String, f_labels: String, lx: u16, ly: u16 },
    /// Class-count vector violating the counting inequality.
    CountingVector { counts: Vec<u64>, lhs: u64, j_min: u64, t_min: u64 },
    /// A structural expectation that failed (cardinalities, map pullback).
    Structural { description: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: String,
    /// Number of cases enumerated.
    pub universe: u64,
    pub counterexamples: Vec<Counterexample>,
    pub elapsed_ms: u64,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

const MAX_RECORDED: usize = 16;

fn record(list: &mut Vec<Counterexample>, extra: &mut u64, ce: Counterexample) {
    if list.len() < MAX_RECORDED {
        list.push(ce);
    } else {
        *extra += 1;
    }
}

/// All 9-bit masks with at least `k` bits set.
fn masks_with_at_least(k: u32) -> Vec<u16> {
    (0u16..512).filter(|m| m.count_ones() >= k).collect()
}

// ---------------------------------------------------------------------------
// Disjoint-pair fact
// ---------------------------------------------------------------------------

/// Checks that every pair of link masks with four or more edges each admits
/// two disjoint cross pairs, one from each mask.
pub fn verify_fact_xy() -> VerificationReport {
    let start = Instant::now();
    let masks = masks_with_at_least(4);
    let mut counterexamples = Vec::new();
    let mut extra = 0;
    let mut universe = 0u64;
    for &lx in &masks {
        for &ly in &masks {
            universe += 1;
            if find_disjoint_pair(lx, ly).is_none() {
                record(&mut counterexamples, &mut extra, Counterexample::MaskPair { lx, ly });
            }
        }
    }
    let mut notes = vec![format!("masks with >=4 edges: {}", masks.len())];
    if extra > 0 {
        notes.push(format!("{} further counterexamples suppressed", extra));
    }
    VerificationReport {
        claim: "fact-xy".into(),
        universe,
        counterexamples,
        elapsed_ms: start.elapsed().as_millis() as u64,
        notes,
    }
}

// ---------------------------------------------------------------------------
// Tier-table swap guarantees
// ---------------------------------------------------------------------------

fn distinct_permutations<T: Copy + Ord>(items: [T; 3]) -> Vec<[T; 3]> {
    let mut out = vec![
        [items[0], items[1], items[2]],
        [items[0], items[2], items[1]],
        [items[1], items[0], items[2]],
        [items[1], items[2], items[0]],
        [items[2], items[0], items[1]],
        [items[2], items[1], items[0]],
    ];
    out.sort_unstable();
    out.dedup();
    out
}

/// The nine cross-pair positions `(a, b)` that leave released pair
/// `(3-ae-be, 3-af-bf)`; `good[a]` collects the partner bits `b` whose
/// released labels satisfy `accept`.
fn good_partner_table(accept: impl Fn(usize, usize) -> bool) -> [u16; 9] {
    let mut good = [0u16; 9];
    for a in 0..9 {
        let (ae, af) = (a / 3, a % 3);
        for b in 0..9 {
            let (be, bf) = (b / 3, b % 3);
            if ae == be || af == bf {
                continue;
            }
            if accept(3 - ae - be, 3 - af - bf) {
                good[a] |= 1 << b;
            }
        }
    }
    good
}

fn swap_exists(lx: u16, ly: u16, good: &[u16; 9]) -> bool {
    let mut rem = lx;
    while rem != 0 {
        let a = rem.trailing_zeros() as usize;
        if good[a] & ly != 0 {
            return true;
        }
        rem &= rem - 1;
    }
    false
}

fn label_name(labels: &[RelType; 3]) -> String {
    labels
        .iter()
        .map(|t| match t {
            RelType::Little => 'l',
            RelType::Large => 'L',
            RelType::NotSmall => 'N',
        })
        .collect()
}

/// Largest `min(|lx|, |ly|)` over mask pairs on which no qualifying swap
/// exists, given the per-position partner table. The guarantee is therefore
/// sufficient from that count plus one upward (and from 0 when no pair ever
/// fails). For each lx the heaviest failing partner is the complement of the
/// bits lx can complete.
fn max_failing_count(good: &[u16; 9]) -> u32 {
    let mut worst = 0u32;
    for lx in 0u16..512 {
        let mut reachable = 0u16;
        let mut rem = lx;
        while rem != 0 {
            let a = rem.trailing_zeros() as usize;
            reachable |= good[a];
            rem &= rem - 1;
        }
        let heaviest_bad = (!reachable & 0x1FF).count_ones();
        worst = worst.max(lx.count_ones().min(heaviest_bad));
    }
    worst
}

/// Verifies the Small-vertex swap guarantee: for every type pair at tier
/// `i <= 8`, every consistent positional labeling of the six tuple vertices,
/// and every pair of link masks with at least `i` edges each, some disjoint
/// cross pair releases a not-small vertex or two large ones.
pub fn verify_t_lemma() -> VerificationReport {
    let start = Instant::now();
    let all = RelTripleType::all();
    let mut counterexamples = Vec::new();
    let mut extra = 0;
    let mut universe = 0u64;
    let mut per_tier = std::collections::BTreeMap::new();
    let mut minimal_counts: Vec<String> = Vec::new();
    for (i, &t1) in all.iter().enumerate() {
        for &t2 in &all[i..] {
            let tier = rel_pair_tier(t1, t2);
            if tier > 8 {
                continue;
            }
            let masks = masks_with_at_least(tier as u32);
            let mut assignments: Vec<(RelTripleType, RelTripleType)> = vec![(t1, t2)];
            if t1 != t2 {
                assignments.push((t2, t1));
            }
            let mut minimal_sufficient = 0u32;
            for (te, tf) in assignments {
                for e_labels in distinct_permutations(te.0) {
                    for f_labels in distinct_permutations(tf.0) {
                        let good = good_partner_table(|re, rf| {
                            let le = e_labels[re];
                            let lf = f_labels[rf];
                            le == RelType::NotSmall
                                || lf == RelType::NotSmall
                                || (le == RelType::Large && lf == RelType::Large)
                        });
                        minimal_sufficient = minimal_sufficient.max(max_failing_count(&good) + 1);
                        for &lx in &masks {
                            for &ly in &masks {
                                universe += 1;
                                if !swap_exists(lx, ly, &good) {
                                    record(
                                        &mut counterexamples,
                                        &mut extra,
                                        Counterexample::LabeledMaskPair {
                                            tier,
                                            e_labels: label_name(&e_labels),
                                            f_labels: label_name(&f_labels),
                                            lx,
                                            ly,
                                        },
                                    );
                                }
                            }
                        }
                    }
                }
            }
            *per_tier.entry(tier).or_insert(0u64) += 1;
            // observed, not asserted: tightness of the tier assignments
            minimal_counts.push(format!(
                "{}+{}: tier {}, minimal sufficient link count {}",
                t1.name(),
                t2.name(),
                tier,
                minimal_sufficient
            ));
        }
    }
    let mut notes: Vec<String> = per_tier
        .iter()
        .map(|(tier, count)| format!("tier {}: {} type pairs", tier, count))
        .collect();
    notes.extend(minimal_counts);
    if extra > 0 {
        notes.push(format!("{} further counterexamples suppressed", extra));
    }
    VerificationReport {
        claim: "t-lemma".into(),
        universe,
        counterexamples,
        elapsed_ms: start.elapsed().as_millis() as u64,
        notes,
    }
}

/// Verifies the Big-vertex swap guarantee (released pair must contain a Big
/// vertex) for tiers 4..=7, plus the pullback correspondence between the two
/// tier tables on the four generator pairs.
pub fn verify_s_lemma() -> VerificationReport {
    let start = Instant::now();
    let mut counterexamples = Vec::new();
    let mut extra = 0;
    let mut universe = 0u64;

    // Structural pullback: big classes map to small-relative classes
    // (0,1,2,3 Big) -> (lll, llN, lNN, NNN); tiers must agree on the
    // generator pairs.
    use RelType::{Little as I, NotSmall as N};
    let image = [
        RelTripleType::from_labels([I, I, I]),
        RelTripleType::from_labels([I, I, N]),
        RelTripleType::from_labels([I, N, N]),
        RelTripleType::from_labels([N, N, N]),
    ];
    for (c1, c2) in [(0usize, 3usize), (1, 2), (1, 1), (0, 1)] {
        universe += 1;
        let s = big_pair_tier(BigCountType(c1 as u8), BigCountType(c2 as u8));
        let t = rel_pair_tier(image[c1], image[c2]);
        if s != t {
            record(
                &mut counterexamples,
                &mut extra,
                Counterexample::Structural {
                    description: format!(
                        "pullback mismatch on ({},{}) Big: s-tier {} vs t-tier {}",
                        c1, c2, s, t
                    ),
                },
            );
        }
    }

    // positional labelings: true = Big
    let label_string = |labels: &[bool; 3]| -> String {
        labels.iter().map(|&b| if b { 'B' } else { 'b' }).collect()
    };
    let mut minimal_counts: Vec<String> = Vec::new();
    for c1 in 0..=3u8 {
        for c2 in c1..=3u8 {
            let tier = big_pair_tier(BigCountType(c1), BigCountType(c2));
            if tier > 7 {
                continue;
            }
            let masks = masks_with_at_least(tier as u32);
            let mut assignments = vec![(c1, c2)];
            if c1 != c2 {
                assignments.push((c2, c1));
            }
            let mut minimal_sufficient = 0u32;
            for (ce, cf) in assignments {
                for e_bits in 0u8..8 {
                    if e_bits.count_ones() != ce as u32 {
                        continue;
                    }
                    for f_bits in 0u8..8 {
                        if f_bits.count_ones() != cf as u32 {
                            continue;
                        }
                        let e_labels = [e_bits & 1 != 0, e_bits & 2 != 0, e_bits & 4 != 0];
                        let f_labels = [f_bits & 1 != 0, f_bits & 2 != 0, f_bits & 4 != 0];
                        let good = good_partner_table(|re, rf| e_labels[re] || f_labels[rf]);
                        minimal_sufficient = minimal_sufficient.max(max_failing_count(&good) + 1);
                        for &lx in &masks {
                            for &ly in &masks {
                                universe += 1;
                                if !swap_exists(lx, ly, &good) {
                                    record(
                                        &mut counterexamples,
                                        &mut extra,
                                        Counterexample::LabeledMaskPair {
                                            tier,
                                            e_labels: label_string(&e_labels),
                                            f_labels: label_string(&f_labels),
                                            lx,
                                            ly,
                                        },
                                    );
                                }
                            }
                        }
                    }
                }
            }
            minimal_counts.push(format!(
                "{}+{}: tier {}, minimal sufficient link count {}",
                BigCountType(c1).name(),
                BigCountType(c2).name(),
                tier,
                minimal_sufficient
            ));
        }
    }
    let mut notes = vec!["pullback checked on the four generator pairs".to_string()];
    notes.extend(minimal_counts);
    if extra > 0 {
        notes.push(format!("{} further counterexamples suppressed", extra));
    }
    VerificationReport {
        claim: "s-lemma".into(),
        universe,
        counterexamples,
        elapsed_ms: start.elapsed().as_millis() as u64,
        notes,
    }
}

// ---------------------------------------------------------------------------
// Partition cardinalities
// ---------------------------------------------------------------------------

/// Checks the class and pair-type cardinalities (10 -> 55 and 4 -> 10) and
/// that both tier maps are total partitions of the pair-type universes.
pub fn verify_partition_counts() -> VerificationReport {
    let start = Instant::now();
    let mut counterexamples = Vec::new();
    let mut extra = 0;
    let mut notes = Vec::new();
    let mut universe = 0u64;

    let rel = RelTripleType::all();
    universe += rel.len() as u64;
    if rel.len() != 10 {
        record(
            &mut counterexamples,
            &mut extra,
            Counterexample::Structural {
                description: format!("expected 10 relative classes, found {}", rel.len()),
            },
        );
    }
    let mut rel_hist = std::collections::BTreeMap::new();
    let mut rel_pairs = 0u64;
    for (i, &a) in rel.iter().enumerate() {
        for &b in &rel[i..] {
            rel_pairs += 1;
            universe += 1;
            let tier = rel_pair_tier(a, b);
            if ![4, 5, 6, 7, 8, 10].contains(&tier) {
                record(
                    &mut counterexamples,
                    &mut extra,
                    Counterexample::Structural {
                        description: format!("pair ({},{}) got tier {}", a.name(), b.name(), tier),
                    },
                );
            }
            *rel_hist.entry(tier).or_insert(0u64) += 1;
        }
    }
    if rel_pairs != 55 {
        record(
            &mut counterexamples,
            &mut extra,
            Counterexample::Structural {
                description: format!("expected 55 relative pair types, found {}", rel_pairs),
            },
        );
    }
    notes.push(format!(
        "relative tiers: {}",
        rel_hist
            .iter()
            .map(|(t, c)| format!("{}:{}", t, c))
            .collect::<Vec<_>>()
            .join(" ")
    ));

    let big = BigCountType::all();
    universe += big.len() as u64;
    let mut big_hist = std::collections::BTreeMap::new();
    let mut big_pairs = 0u64;
    for (i, &a) in big.iter().enumerate() {
        for &b in &big[i..] {
            big_pairs += 1;
            universe += 1;
            let tier = big_pair_tier(a, b);
            if ![4, 5, 6, 7, 10].contains(&tier) {
                record(
                    &mut counterexamples,
                    &mut extra,
                    Counterexample::Structural {
                        description: format!("pair ({},{}) got tier {}", a.name(), b.name(), tier),
                    },
                );
            }
            *big_hist.entry(tier).or_insert(0u64) += 1;
        }
    }
    if big_pairs != 10 {
        record(
            &mut counterexamples,
            &mut extra,
            Counterexample::Structural {
                description: format!("expected 10 big pair types, found {}", big_pairs),
            },
        );
    }
    notes.push(format!(
        "big tiers: {}",
        big_hist
            .iter()
            .map(|(t, c)| format!("{}:{}", t, c))
            .collect::<Vec<_>>()
            .join(" ")
    ));

    VerificationReport {
        claim: "partition-counts".into(),
        universe,
        counterexamples,
        elapsed_ms: start.elapsed().as_millis() as u64,
        notes,
    }
}

// ---------------------------------------------------------------------------
// Counting inequality on the class-count lattice
// ---------------------------------------------------------------------------

/// Small/little weights per relative class (how many Small vertices and how
/// many Little vertices a tuple of that class contributes).
fn class_weights(t: &RelTripleType) -> (u64, u64) {
    let smalls = t.0.iter().filter(|&&l| l != RelType::NotSmall).count() as u64;
    let littles = t.0.iter().filter(|&&l| l == RelType::Little).count() as u64;
    (smalls, littles)
}

/// Exhaustively verifies, over all class-count vectors with at most `m_max`
/// tuples, that the tier excess `sum (tier-4) |T^tier|` is bounded by the
/// product of the two counting lower bounds (little count times small
/// count). Larger step/rank values only increase the bound, so checking the
/// minima covers every admissible pair.
pub fn verify_counting_arithmetic(m_max: usize) -> VerificationReport {
    let start = Instant::now();
    let all = RelTripleType::all();
    let excess: Vec<Vec<u64>> = all
        .iter()
        .map(|&a| {
            all.iter()
                .map(|&b| {
                    let tier = rel_pair_tier(a, b) as u64;
                    if tier == 10 {
                        6
                    } else {
                        tier - 4
                    }
                })
                .collect()
        })
        .collect();
    let weights: Vec<(u64, u64)> = all.iter().map(class_weights).collect();

    let mut counterexamples = Vec::new();
    let mut extra = 0;
    let mut universe = 0u64;
    let mut counts = [0u64; 10];

    #[allow(clippy::too_many_arguments)]
    fn walk(
        slot: usize,
        remaining: u64,
        counts: &mut [u64; 10],
        excess: &Vec<Vec<u64>>,
        weights: &[(u64, u64)],
        universe: &mut u64,
        counterexamples: &mut Vec<Counterexample>,
        extra: &mut u64,
    ) {
        if slot == 10 {
            *universe += 1;
            let mut lhs = 0u64;
            let mut t_min = 0u64;
            let mut j_min = 0u64;
            for i in 0..10 {
                let ci = counts[i];
                if ci == 0 {
                    continue;
                }
                t_min += ci * weights[i].0;
                j_min += ci * weights[i].1;
                lhs += ci * (ci - 1) / 2 * excess[i][i];
                for j in i + 1..10 {
                    lhs += ci * counts[j] * excess[i][j];
                }
            }
            if lhs > j_min * t_min {
                record(
                    counterexamples,
                    extra,
                    Counterexample::CountingVector {
                        counts: counts.to_vec(),
                        lhs,
                        j_min,
                        t_min,
                    },
                );
            }
            return;
        }
        for c in 0..=remaining {
            counts[slot] = c;
            walk(slot + 1, remaining - c, counts, excess, weights, universe, counterexamples, extra);
        }
        counts[slot] = 0;
    }

    walk(
        0,
        m_max as u64,
        &mut counts,
        &excess,
        &weights,
        &mut universe,
        &mut counterexamples,
        &mut extra,
    );

    let mut notes = vec![format!("class-count vectors with at most {} tuples", m_max)];
    if extra > 0 {
        notes.push(format!("{} further counterexamples suppressed", extra));
    }
    VerificationReport {
        claim: "counting-arithmetic".into(),
        universe,
        counterexamples,
        elapsed_ms: start.elapsed().as_millis() as u64,
        notes,
    }
}
