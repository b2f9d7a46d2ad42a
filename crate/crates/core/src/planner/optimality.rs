use std::fmt;

use crate::ingest::DocumentStats;
use crate::model::{decompose, Axis, QNodeId, TwigQuery};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Optimal,
    NotGuaranteed,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Optimal => "optimal",
            Verdict::NotGuaranteed => "not-guaranteed",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A PC edge off the path from a constraining subquery's top to its
    /// constrained node, below a recursive tag: the ancestor-side PC
    /// semi-join may buffer without bound.
    RecursivePcFilter {
        parent: QNodeId,
        child: QNodeId,
        tag: String,
    },
    /// The core branches at this node, so some partial-join gets a
    /// repeating ancestor input.
    CoreNotPath { node: QNodeId },
    /// A core node whose tag is recursive feeds a partial-join stack.
    RecursiveCoreNode { node: QNodeId, tag: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RecursivePcFilter { parent, child, tag } => write!(
                f,
                "PC filter edge {parent}->{child} hangs below recursive tag '{tag}'"
            ),
            Violation::CoreNotPath { node } => {
                write!(
                    f,
                    "query core branches at node {node}; the core is not a path"
                )
            }
            Violation::RecursiveCoreNode { node, tag } => {
                write!(f, "core node {node} has recursive tag '{tag}'")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimalityReport {
    pub verdict: Verdict,
    pub violations: Vec<Violation>,
}

/// Predicts whether the binary-join plan runs in time linear in input plus
/// output and space linear in document depth.
pub fn predict_optimality(query: &TwigQuery, stats: &DocumentStats) -> OptimalityReport {
    let dec = decompose(query);
    let mut violations = Vec::new();
    for q in dec.core_nodes() {
        let top = dec.cons_root(q);
        let spine = query.path_from_root(q);
        for (parent, child, axis) in query.edges() {
            if axis != Axis::Pc || !dec.in_cons(q, parent) || !dec.in_cons(q, child) {
                continue;
            }
            // Edges on the spine from `top` down to q are parent-side
            // semi-joins, whose stacks stay within the document depth.
            let on_spine = spine.contains(&child) && spine.contains(&parent) && child != top;
            if !on_spine && stats.is_recursive(query.tag(parent)) {
                violations.push(Violation::RecursivePcFilter {
                    parent,
                    child,
                    tag: query.tag(parent).to_string(),
                });
            }
        }
    }
    if query.output_count() > 1 {
        for q in dec.core_nodes() {
            if dec.core_children(query, q).len() > 1 {
                violations.push(Violation::CoreNotPath { node: q });
            }
        }
        for q in dec.core_nodes() {
            if stats.is_recursive(query.tag(q)) {
                violations.push(Violation::RecursiveCoreNode {
                    node: q,
                    tag: query.tag(q).to_string(),
                });
            }
        }
    }
    OptimalityReport {
        verdict: if violations.is_empty() {
            Verdict::Optimal
        } else {
            Verdict::NotGuaranteed
        },
        violations,
    }
}
