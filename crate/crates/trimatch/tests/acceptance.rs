//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use std::sync::OnceLock;

use trimatch::absorb::{absorb, is_absorbing_set, AbsorbingFamily, AbsorbingSet, FamilyEntry};
use trimatch::degree::{rat, ClassMap, VertexClass};
use trimatch::forge;
use trimatch::graph::{ThreeGraph, Triple, VertexSet};
use trimatch::oracle::{self, Decision, OracleConfig};
use trimatch::pipeline::{find_perfect_matching, validate_perfect_matching, PipelineOptions, PipelineOutcome, Stage};
use trimatch::verifier;

fn criterion(number: u32, name: &str, body: impl FnOnce() + std::panic::UnwindSafe) {
    let result = std::panic::catch_unwind(body);
    let verdict = if result.is_ok() { "PASS" } else { "FAIL" };
    println!("acceptance criterion {} ({}): {}", number, name, verdict);
    if let Err(cause) = result {
        std::panic::resume_unwind(cause);
    }
}

#[test]
fn criterion_1_fact_verification() {
    criterion(1, "fact-xy exhaustive", || {
        let report = verifier::verify_fact_xy();
        assert_eq!(report.universe, 145_924, "universe must be 382^2");
        assert_eq!(report.counterexamples.len(), 0, "{:?}", report.counterexamples);
        assert!(report.elapsed_ms < 10_000, "took {} ms", report.elapsed_ms);
    });
}

#[test]
fn criterion_2_swapping_lemma_verification() {
    criterion(2, "tier-table swap guarantees", || {
        let t = verifier::verify_t_lemma();
        assert_eq!(t.counterexamples.len(), 0, "{:?}", t.counterexamples);
        let s = verifier::verify_s_lemma();
        assert_eq!(s.counterexamples.len(), 0, "{:?}", s.counterexamples);
        assert!(
            t.elapsed_ms + s.elapsed_ms < 300_000,
            "took {} ms total",
            t.elapsed_ms + s.elapsed_ms
        );
    });
}

#[test]
fn criterion_3_partition_arithmetic() {
    criterion(3, "partition cardinalities 10/55 and 4/10", || {
        let report = verifier::verify_partition_counts();
        assert!(report.passed(), "{:?}", report.counterexamples);

        // recount here as well: the cardinalities are themselves claims
        let rel = trimatch::swap::RelTripleType::all();
        assert_eq!(rel.len(), 10);
        let mut rel_pairs = 0;
        let mut hist = std::collections::BTreeMap::new();
        for (i, &a) in rel.iter().enumerate() {
            for &b in &rel[i..] {
                rel_pairs += 1;
                *hist.entry(trimatch::swap::rel_pair_tier(a, b)).or_insert(0u32) += 1;
            }
        }
        assert_eq!(rel_pairs, 55);
        assert_eq!(hist.values().sum::<u32>(), 55, "tier map must partition the 55 pair types");

        let big = trimatch::swap::BigCountType::all();
        assert_eq!(big.len(), 4);
        let mut big_pairs = 0;
        let mut hist = std::collections::BTreeMap::new();
        for (i, &a) in big.iter().enumerate() {
            for &b in &big[i..] {
                big_pairs += 1;
                *hist.entry(trimatch::swap::big_pair_tier(a, b)).or_insert(0u32) += 1;
            }
        }
        assert_eq!(big_pairs, 10);
        assert_eq!(hist.values().sum::<u32>(), 10);
    });
}

#[test]
fn criterion_4_counting_lattice() {
    criterion(4, "counting inequality on the lattice", || {
        let report = verifier::verify_counting_arithmetic(12);
        assert_eq!(report.counterexamples.len(), 0, "{:?}", report.counterexamples);
    });
}

#[test]
fn criterion_5_barrier_regressions() {
    criterion(5, "barrier families and closed-form degrees", || {
        let cfg = OracleConfig::default();
        for n in [6usize, 12] {
            let g = forge::gen_intro_barrier(n).unwrap();
            let res = oracle::has_perfect_matching(&g, &cfg).unwrap();
            assert_eq!(res.decision, Decision::NoPerfectMatching, "intro n={}", n);
        }
        for n in [12usize, 15, 18] {
            let g = forge::gen_space_barrier(n).unwrap();
            let res = oracle::has_perfect_matching(&g, &cfg).unwrap();
            assert_eq!(res.decision, Decision::NoPerfectMatching, "space n={}", n);
            let expected = 2 * n * n / 9 - n + 1;
            for v in 0..=n / 3 {
                assert_eq!(g.degree(v), expected, "space n={} v={}", n, v);
            }
        }
        for n in [9usize, 15] {
            let g = forge::gen_parity_barrier(n).unwrap();
            let res = oracle::has_perfect_matching(&g, &cfg).unwrap();
            assert_eq!(res.decision, Decision::NoPerfectMatching, "parity n={}", n);
            let expected = (n / 3 - 1) * (2 * n / 3);
            for v in 0..n / 3 {
                assert_eq!(g.degree(v), expected, "parity n={} v={}", n, v);
            }
        }
    });
}

#[test]
fn criterion_6_oracle_ground_truth() {
    criterion(6, "oracle vs all-partitions enumerator", || {
        let cfg = OracleConfig::default();
        let mut checked = 0u32;
        let mut with_pm = 0u32;
        for (n, count) in [(6usize, 400u64), (9, 400), (12, 200)] {
            for seed in 0..count {
                let (num, den) = match seed % 3 {
                    0 => (3, 20),
                    1 => (3, 10),
                    _ => (1, 2),
                };
                let g = common::random_graph(n, num, den, seed * 31 + n as u64);
                let res = oracle::has_perfect_matching(&g, &cfg).unwrap();
                let expected = common::naive_has_pm(&g);
                let got = res.decision == Decision::PerfectMatchingExists;
                assert_eq!(got, expected, "n={} seed={}", n, seed);
                if got {
                    with_pm += 1;
                    let w = res.witness.unwrap();
                    assert!(validate_perfect_matching(&g, &w));
                }
                checked += 1;
            }
        }
        assert_eq!(checked, 1000);
        assert!(with_pm > 50, "instance mix too one-sided: {} with PM", with_pm);
        println!("  oracle agreement on 1000 graphs ({} with a PM)", with_pm);
    });
}

#[test]
fn criterion_7_absorbing_soundness() {
    criterion(7, "absorbing-set definition and gadget absorption", || {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut agreements = 0u32;
        let mut absorbing_count = 0u32;
        for seed in 0..1000u64 {
            let n = 9 + 3 * (seed % 2) as usize; // 9 or 12
            let (num, den) = match seed % 3 {
                0 => (1, 4),
                1 => (1, 2),
                _ => (3, 4),
            };
            let g = common::random_graph(n, num, den, 0xAB50 + seed);
            let mut rng = ChaCha8Rng::seed_from_u64(0x5E7 + seed);
            let mut ids: Vec<usize> = (0..n).collect();
            ids.shuffle(&mut rng);
            let a: [usize; 6] = ids[..6].try_into().unwrap();
            let t: [usize; 3] = ids[6..9].try_into().unwrap();

            let set = AbsorbingSet::new(a).unwrap();
            let triple = Triple::new(t[0], t[1], t[2]).unwrap();
            let got = is_absorbing_set(&g, &set, &triple).unwrap();
            let expected = common::brute_is_absorbing(&g, &a, &t);
            assert_eq!(got, expected, "seed={}", seed);
            agreements += 1;
            if got {
                absorbing_count += 1;
            }
        }
        assert_eq!(agreements, 1000);
        assert!(absorbing_count > 0, "instance mix never produced an absorbing set");
        println!("  definitional agreement on 1000 triples ({} absorbing)", absorbing_count);

        // gadget absorption returns exactly the constructed matching
        let g = common::template_graph();
        let fam = AbsorbingFamily {
            entries: vec![FamilyEntry {
                set: AbsorbingSet::new([3, 4, 5, 6, 7, 8]).unwrap(),
                base: [Triple::new(3, 5, 6).unwrap(), Triple::new(4, 7, 8).unwrap()],
            }],
        };
        let mut classes = vec![VertexClass::Small; 9];
        classes[1] = VertexClass::Big;
        classes[2] = VertexClass::Big;
        let classes = ClassMap::from_vec(classes);
        let w: VertexSet = [0, 1, 2].into_iter().collect();
        let result = absorb(&g, &fam, &w, &classes).unwrap();
        assert_eq!(
            result.matching,
            vec![
                Triple::new(0, 3, 4).unwrap(),
                Triple::new(1, 5, 6).unwrap(),
                Triple::new(2, 7, 8).unwrap(),
            ]
        );
    });
}

struct PipelineCase {
    n: usize,
    t: usize,
    seed: u64,
    graph: ThreeGraph,
    outcome: PipelineOutcome,
}

fn pipeline_cases() -> &'static Vec<PipelineCase> {
    static CASES: OnceLock<Vec<PipelineCase>> = OnceLock::new();
    CASES.get_or_init(|| {
        let mut cases = Vec::new();
        for (n, t) in [(12usize, 2usize), (15, 2), (18, 3), (21, 3)] {
            for seed in 0..25u64 {
                let graph = forge::gen_planted_profile(n, rat(1, 20), t, seed)
                    .expect("planted instance must generate");
                let options = PipelineOptions { seed, ..Default::default() };
                let outcome = find_perfect_matching(&graph, rat(1, 20), t, &options)
                    .expect("profile parameters are valid");
                cases.push(PipelineCase { n, t, seed, graph, outcome });
            }
        }
        cases
    })
}

#[test]
fn criterion_8_pipeline_validity() {
    criterion(8, "pipeline validity on 100 planted instances", || {
        let cases = pipeline_cases();
        assert_eq!(cases.len(), 100);
        let mut emitted = 0u32;
        for case in cases {
            let ctx = format!("n={} t={} seed={}", case.n, case.t, case.seed);
            if let Some(m) = &case.outcome.matching {
                emitted += 1;
                assert!(
                    validate_perfect_matching(&case.graph, m),
                    "emitted matching fails the independent validator: {}",
                    ctx
                );
            }
            if case.outcome.stage == Stage::Done {
                let m = case.outcome.matching.as_ref().expect("Done requires a matching");
                let covered: VertexSet = m.iter().flat_map(|t| t.vertices()).collect();
                assert_eq!(covered.len(), case.n, "Done without exact coverage: {}", ctx);
            }
            if let Some(summary) = &case.outcome.oracle {
                if summary.decision == Decision::NoPerfectMatching {
                    assert_ne!(case.outcome.stage, Stage::Done, "{}", ctx);
                    assert!(case.outcome.matching.is_none(), "{}", ctx);
                }
            }
        }
        println!("  {} of 100 runs emitted a validated perfect matching", emitted);
    });
}

#[test]
fn criterion_9_swap_monovariant() {
    criterion(9, "potential strictly increases along swap traces", || {
        let cases = pipeline_cases();
        let mut events = 0u32;
        for case in cases {
            for trace in &case.outcome.swap_traces {
                for ev in &trace.events {
                    assert!(
                        ev.phi_after > ev.phi_before,
                        "non-increasing potential: n={} seed={}",
                        case.n,
                        case.seed
                    );
                    assert!(
                        ev.edge_tuples_after >= ev.edge_tuples_before,
                        "matching size decreased: n={} seed={}",
                        case.n,
                        case.seed
                    );
                    events += 1;
                }
            }
        }
        println!("  checked {} swap events across 100 traces", events);
    });
}
