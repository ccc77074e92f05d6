use std::fs;
use std::io::Read;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use trimatch::absorb::{absorb, build_absorbing_family};
use trimatch::degree::{
    classify, classify_relaxed_big, parse_rat, satisfies_profile, DegreeProfile, ProfileKind,
};
use trimatch::forge::InstanceSpec;
use trimatch::graph::{ThreeGraph, Triple, VertexSet};
use trimatch::oracle::{self, OracleConfig};
use trimatch::pipeline::{find_perfect_matching, run_almost, PipelineOptions};
use trimatch::verifier;

/// Perfect matchings in 3-uniform hypergraphs under degree-sequence
/// thresholds: generators, profile checks, an exact oracle, the staged
/// matching pipeline, and exhaustive verification of the underlying
/// combinatorial claims.
#[derive(Parser)]
#[command(name = "trimatch", version)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 30)]
    oracle_limit: usize,
    /// Proceed past unsatisfied degree profiles.
    #[arg(long, global = true)]
    force: bool,
    /// Time budget in seconds for exact searches.
    #[arg(long, global = true)]
    time_budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance (e.g. "space:n=12", "planted:n=15,gamma=1/20,t=2,seed=1").
    Gen {
        spec: String,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<String>,
    },
    /// Check a degree profile (e.g. "main:gamma=1/100,t=3") against a graph.
    Check {
        /// Graph file, '-' for stdin, or an instance spec string.
        graph: String,
        #[arg(long)]
        profile: String,
    },
    /// Run the staged perfect-matching pipeline.
    Match {
        graph: String,
        #[arg(long)]
        gamma: String,
        #[arg(long, default_value_t = 0)]
        t: usize,
        /// Override the absorbing-family set budget.
        #[arg(long)]
        absorb_budget: Option<usize>,
        /// Override the almost-stage gamma (rational "p/q").
        #[arg(long)]
        gamma2: Option<String>,
    },
    /// Run only the almost-perfect matching stage.
    Almost {
        graph: String,
        #[arg(long)]
        gamma: String,
        #[arg(long, default_value_t = 0)]
        t: usize,
    },
    /// Exact perfect-matching decision (and obstruction search).
    Oracle {
        graph: String,
        /// Also compute the maximum matching size.
        #[arg(long)]
        max: bool,
        #[arg(long)]
        node_budget: Option<u64>,
    },
    /// Exhaustively verify the finite combinatorial claims.
    Verify {
        #[arg(value_enum)]
        claim: Claim,
        /// Lattice bound for the counting check.
        #[arg(long, default_value_t = 12)]
        m_max: usize,
    },
    /// Build an absorbing family and absorb a chosen leftover set.
    AbsorbDemo {
        graph: String,
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        budget: Option<usize>,
        /// Comma-separated leftover vertices (size divisible by 3).
        #[arg(long)]
        w: Option<String>,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Claim {
    FactXy,
    TLemma,
    SLemma,
    PartitionCounts,
    Counting,
    All,
}

fn emit<T: Serialize>(format: Format, payload: &T, text: String) {
    match format {
        Format::Text => println!("{}", text.trim_end()),
        Format::Json => {
            let wrapped = serde_json::json!({ "schema_version": 1u32, "payload": payload });
            println!("{}", serde_json::to_string_pretty(&wrapped).expect("serializable payload"));
        }
    }
}

fn load_graph(arg: &str) -> Result<ThreeGraph, String> {
    if arg == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(|e| e.to_string())?;
        return ThreeGraph::from_text(&buf).map_err(|e| e.to_string());
    }
    if arg.contains(':') {
        let spec = InstanceSpec::parse(arg).map_err(|e| e.to_string())?;
        return spec.generate().map_err(|e| e.to_string());
    }
    let text = fs::read_to_string(arg).map_err(|e| format!("{}: {}", arg, e))?;
    ThreeGraph::from_text(&text).map_err(|e| e.to_string())
}

fn triples_line(m: &[Triple]) -> String {
    m.iter().map(|t| format!("{{{}}}", t)).collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {}", msg);
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<ExitCode, String> {
    let time_budget = cli.time_budget.map(Duration::from_secs);
    match &cli.command {
        Command::Gen { spec, out } => {
            let parsed = InstanceSpec::parse(spec).map_err(|e| e.to_string())?;
            let g = parsed.generate().map_err(|e| e.to_string())?;
            let text = g.to_text();
            match out {
                Some(path) => fs::write(path, &text).map_err(|e| e.to_string())?,
                None => match cli.format {
                    Format::Text => print!("{}", text),
                    Format::Json => {
                        let payload = serde_json::json!({
                            "schema_version": 1u32,
                            "n": g.n(),
                            "edges": g.edges(),
                        });
                        println!("{}", serde_json::to_string_pretty(&payload).expect("json"));
                    }
                },
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { graph, profile } => {
            let g = load_graph(graph)?;
            let p = DegreeProfile::parse(profile).map_err(|e| e.to_string())?;
            let check = satisfies_profile(&g, &p).map_err(|e| e.to_string())?;
            let text = match &check.first_violation {
                None => format!("{} satisfied on n={}", p, g.n()),
                Some(v) => format!(
                    "{} violated at rank {}: degree {} < required {}",
                    p, v.rank, v.degree, v.required
                ),
            };
            emit(cli.format, &check, text);
            Ok(ExitCode::SUCCESS)
        }
        Command::Match { graph, gamma, t, absorb_budget, gamma2 } => {
            let g = load_graph(graph)?;
            let gamma = parse_rat(gamma).map_err(|e| e.to_string())?;
            let gamma2 = gamma2
                .as_deref()
                .map(parse_rat)
                .transpose()
                .map_err(|e| e.to_string())?;
            let options = PipelineOptions {
                force: cli.force,
                seed: cli.seed,
                oracle_limit: cli.oracle_limit,
                time_budget,
                absorb_budget: *absorb_budget,
                gamma2_override: gamma2,
                ..Default::default()
            };
            let outcome = find_perfect_matching(&g, gamma, *t, &options).map_err(|e| e.to_string())?;
            let mut text = String::new();
            for r in &outcome.stage_reports {
                text.push_str(&format!("[{:?}] {}\n", r.stage, r.summary));
            }
            text.push_str(&format!("stage: {:?}\n", outcome.stage));
            match &outcome.matching {
                Some(m) => text.push_str(&format!(
                    "perfect matching ({} edges, validated): {}\n",
                    m.len(),
                    triples_line(m)
                )),
                None => text.push_str("no perfect matching emitted\n"),
            }
            emit(cli.format, &outcome, text);
            Ok(ExitCode::SUCCESS)
        }
        Command::Almost { graph, gamma, t } => {
            let g = load_graph(graph)?;
            let gamma = parse_rat(gamma).map_err(|e| e.to_string())?;
            let outcome =
                run_almost(&g, gamma, *t, cli.force, cli.oracle_limit, cli.seed).map_err(|e| e.to_string())?;
            let text = format!(
                "profile {}satisfied; size {}/{} ({}); leave {} with {} Big ({})\nmatching: {}",
                if outcome.profile_satisfied { "" } else { "not " },
                outcome.matching.len(),
                outcome.size_target,
                if outcome.size_met { "met" } else { "short" },
                outcome.leave_size,
                outcome.leave_big,
                if outcome.leave_target_met { "met" } else { "short" },
                triples_line(&outcome.matching),
            );
            emit(cli.format, &outcome, text);
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { graph, max, node_budget } => {
            let g = load_graph(graph)?;
            let cfg = OracleConfig {
                limit: cli.oracle_limit,
                node_budget: *node_budget,
                time_budget,
            };
            let res = if *max {
                oracle::max_matching_size(&g, &cfg).map_err(|e| e.to_string())?
            } else {
                oracle::has_perfect_matching(&g, &cfg).map_err(|e| e.to_string())?
            };
            let obstruction = match res.decision {
                oracle::Decision::NoPerfectMatching => oracle::certify_no_pm(&g),
                _ => None,
            };
            let mut text = format!("decision: {:?} ({} nodes)\n", res.decision, res.nodes_explored);
            if let Some(size) = res.max_size {
                text.push_str(&format!("maximum matching size: {}\n", size));
            }
            if let Some(w) = &res.witness {
                if !w.is_empty() {
                    text.push_str(&format!("witness: {}\n", triples_line(w)));
                }
            }
            match &obstruction {
                Some(oracle::Obstruction::Space { a }) => {
                    text.push_str(&format!("space obstruction: A = {:?}\n", a))
                }
                Some(oracle::Obstruction::Parity { a }) => {
                    text.push_str(&format!("parity obstruction: A = {:?}\n", a))
                }
                None => {}
            }
            #[derive(Serialize)]
            struct OracleOut {
                result: oracle::OracleResult,
                obstruction: Option<oracle::Obstruction>,
            }
            emit(cli.format, &OracleOut { result: res, obstruction }, text);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { claim, m_max } => {
            let reports: Vec<verifier::VerificationReport> = match claim {
                Claim::FactXy => vec![verifier::verify_fact_xy()],
                Claim::TLemma => vec![verifier::verify_t_lemma()],
                Claim::SLemma => vec![verifier::verify_s_lemma()],
                Claim::PartitionCounts => vec![verifier::verify_partition_counts()],
                Claim::Counting => vec![verifier::verify_counting_arithmetic(*m_max)],
                Claim::All => vec![
                    verifier::verify_fact_xy(),
                    verifier::verify_t_lemma(),
                    verifier::verify_s_lemma(),
                    verifier::verify_partition_counts(),
                    verifier::verify_counting_arithmetic(*m_max),
                ],
            };
            let mut text = String::new();
            let mut failed = false;
            for r in &reports {
                text.push_str(&format!(
                    "{}: {} cases, {} counterexamples, {} ms\n",
                    r.claim,
                    r.universe,
                    r.counterexamples.len(),
                    r.elapsed_ms
                ));
                for note in &r.notes {
                    text.push_str(&format!("  {}\n", note));
                }
                for ce in &r.counterexamples {
                    text.push_str(&format!("  counterexample: {:?}\n", ce));
                }
                failed |= !r.passed();
            }
            emit(cli.format, &reports, text);
            Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
        }
        Command::AbsorbDemo { graph, gamma, budget, w } => {
            let g = load_graph(graph)?;
            let gamma = parse_rat(gamma).map_err(|e| e.to_string())?;
            let profile = DegreeProfile::new(ProfileKind::Absorbing, gamma, 0)
                .map_err(|e| e.to_string())?;
            let build = build_absorbing_family(&g, &profile, *budget, cli.seed, cli.force)
                .map_err(|e| e.to_string())?;
            let relaxed = classify_relaxed_big(&g, gamma);
            let covered = build.family.covered_vertices();
            let w_set: VertexSet = match w {
                Some(list) => list
                    .split(',')
                    .map(|x| x.trim().parse::<usize>().map_err(|e| e.to_string()))
                    .collect::<Result<_, _>>()?,
                None => {
                    // first uncovered triple with two relaxed-Big vertices
                    let uncovered: Vec<usize> =
                        (0..g.n()).filter(|v| !covered.contains(v)).collect();
                    let mut picked: VertexSet = VertexSet::new();
                    let bigs: Vec<usize> =
                        uncovered.iter().copied().filter(|&v| relaxed.is_big(v)).collect();
                    if bigs.len() >= 2 {
                        picked.insert(bigs[0]);
                        picked.insert(bigs[1]);
                        if let Some(&third) =
                            uncovered.iter().find(|v| !picked.contains(v))
                        {
                            picked.insert(third);
                        }
                    }
                    if picked.len() == 3 {
                        picked
                    } else {
                        VertexSet::new()
                    }
                }
            };
            let absorbed = absorb(&g, &build.family, &w_set, &relaxed).map_err(|e| e.to_string())?;
            let classes = classify(&g, gamma);
            let big_count = w_set.iter().filter(|&&v| classes.is_big(v)).count();
            let text = format!(
                "family ({} sets, budget {}):\n{}absorbing W = {:?} ({} Big of {}):\nmatching: {}",
                build.family.len(),
                build.budget,
                build.family.to_text(),
                w_set,
                big_count,
                w_set.len(),
                triples_line(&absorbed.matching),
            );
            #[derive(Serialize)]
            struct DemoOut {
                family: trimatch::absorb::AbsorbingFamily,
                budget: usize,
                w: VertexSet,
                matching: Vec<Triple>,
            }
            emit(
                cli.format,
                &DemoOut {
                    family: build.family.clone(),
                    budget: build.budget,
                    w: w_set,
                    matching: absorbed.matching,
                },
                text,
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
