//! Toolkit for perfect matchings in 3-uniform hypergraphs under stepped
//! vertex-degree-sequence thresholds.
//!
//! The crate provides:
//! * canonical 3-graph storage with a plain-text format ([`graph`]),
//! * exact-rational degree profiles, ranks and vertex classes ([`degree`]),
//! * link graphs and 9-bit pair-link masks ([`link`]),
//! * exhaustive swap certification and leave improvement ([`swap`]),
//! * absorbing sets, families, and absorption ([`absorb`]),
//! * an exact small-instance matching oracle with obstruction certificates
//!   ([`oracle`]),
//! * extremal and planted instance generators ([`forge`]),
//! * exhaustive verifiers for the finite combinatorial claims behind the
//!   swap machinery ([`verifier`]),
//! * and the staged end-to-end matching pipeline ([`pipeline`]).

pub mod absorb;
pub mod degree;
pub mod forge;
pub mod graph;
pub mod link;
pub mod oracle;
pub mod pipeline;
pub mod swap;
pub mod verifier;

pub use degree::{DegreeProfile, ProfileKind, Rat};
pub use graph::{ThreeGraph, Triple, TupleSystem, Vertex, VertexSet};
