//! Twig pattern query (TPQ) evaluation over containment-labeled XML.
//!
//! The crate is split along the evaluation pipeline:
//!
//! - [`model`]: labels, structural predicates, the query tree and its
//!   core/constraining-subquery decomposition.
//! - [`ingest`]: XML labeling, inverted-list index, synthetic documents.
//! - [`binjoin`]: pull-based binary structural joins (partial- and semi-joins).
//! - [`holjoin`]: a TwigStack-style holistic twig join.
//! - [`planner`]: fully-pipelined plan construction, engine dispatch and
//!   static optimality prediction.
//! - [`exec`]: instrumented plan execution.
//! - [`oracle`]: brute-force reference evaluator.

pub mod binjoin;
pub mod exec;
pub mod holjoin;
pub mod ingest;
pub mod model;
pub mod oracle;
pub mod planner;

pub use exec::{execute, execute_with, ExecOptions, ExecOutcome, ExecStats};
pub use ingest::{parse_and_label, InvertedIndex};
pub use model::{parse_tpq, Axis, NodeLabel, QNodeId, TwigQuery};
pub use planner::{build_plan, Engine, Plan};
