//! Core domain types: labels, structural predicates, the twig query tree and
//! its decomposition into query core and constraining subqueries.

mod decompose;
mod label;
mod parse;
mod query;

pub use decompose::{decompose, QueryDecomposition};
pub use label::{lex_compare, rel_ad, rel_pc, ArityMismatch, NodeLabel};
pub use parse::{parse_pattern, parse_tpq, ParseError};
pub use query::{Axis, NodeSpec, QNodeId, QueryNode, TwigQuery};

/// A row of labels; one column per query node of the producing operator.
pub type Tuple = Vec<NodeLabel>;
