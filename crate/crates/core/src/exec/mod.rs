//! Instrumented plan execution.

mod context;

use std::collections::HashSet;
use std::time::Instant;

use thiserror::Error;

use crate::binjoin::{
    BoxStream, IndexScan, Input, SemiJoinAncAd, SemiJoinAncPc, SemiJoinDescAd, SemiJoinDescPc,
    StackTreeAnc, StackTreeDesc, TupleStream, VecStream,
};
use crate::holjoin::HolisticTwig;
use crate::ingest::InvertedIndex;
use crate::model::{NodeLabel, QNodeId, Tuple, TwigQuery};
use crate::planner::{Op, Plan, PlanNode};

pub use context::{ExecContext, ExecStats};

/// Environment variable that turns on per-operator sortedness checks.
pub const DEBUG_ASSERTS_ENV: &str = "TPQ_DEBUG_ASSERTS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExecOptions {
    /// Verify every operator's output against its declared sort key.
    pub check_sorted: bool,
    /// Record every label pushed by holistic joins.
    pub record_pushes: bool,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions {
            check_sorted: std::env::var(DEBUG_ASSERTS_ENV).is_ok_and(|v| v == "1"),
            record_pushes: false,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExecError {
    #[error("operator contract violated: {0}")]
    Contract(String),
}

#[derive(Clone, Debug)]
pub struct ExecOutcome {
    pub rows: Vec<Tuple>,
    pub stats: ExecStats,
    /// (query node, label) of every holistic push, when recorded.
    pub pushes: Option<Vec<(QNodeId, NodeLabel)>>,
}

pub fn execute(plan: &Plan, idx: &InvertedIndex) -> Result<ExecOutcome, ExecError> {
    execute_with(plan, idx, ExecOptions::default())
}

pub fn execute_with(
    plan: &Plan,
    idx: &InvertedIndex,
    opts: ExecOptions,
) -> Result<ExecOutcome, ExecError> {
    let mut cx = if opts.record_pushes {
        ExecContext::with_push_log()
    } else {
        ExecContext::new()
    };
    let start = Instant::now();
    let mut root = instantiate(&plan.root, idx, opts.check_sorted);
    let mut rows = Vec::new();
    while let Some(t) = root.next(&mut cx) {
        rows.push(t);
    }
    drop(root);
    cx.stats.wall_time = start.elapsed();
    cx.stats.result_rows = rows.len() as u64;
    if let Some(v) = cx.violation() {
        return Err(ExecError::Contract(v.to_string()));
    }
    let pushes = cx.take_push_log();
    Ok(ExecOutcome {
        rows,
        stats: cx.into_stats(),
        pushes,
    })
}

fn input<'a>(node: &PlanNode, idx: &'a InvertedIndex, check: bool) -> Input<'a> {
    Input::new(instantiate(node, idx, check))
}

fn instantiate<'a>(node: &PlanNode, idx: &'a InvertedIndex, check: bool) -> BoxStream<'a> {
    let kid = |k: usize| input(&node.children[k], idx, check);
    let op: BoxStream<'a> = match &node.op {
        Op::IndexScan { tag } => Box::new(IndexScan::new(idx.list(tag))),
        Op::DocumentRoot => Box::new(VecStream::new(vec![vec![idx.document_label()]])),
        Op::SemiJoinAncAd => Box::new(SemiJoinAncAd::new(kid(0), kid(1))),
        Op::SemiJoinDescAd => Box::new(SemiJoinDescAd::new(kid(0), kid(1))),
        Op::SemiJoinAncPc => Box::new(SemiJoinAncPc::new(kid(0), kid(1))),
        Op::SemiJoinDescPc => Box::new(SemiJoinDescPc::new(kid(0), kid(1))),
        Op::StackTreeAnc(s) => Box::new(StackTreeAnc::new(kid(0), kid(1), s.clone())),
        Op::StackTreeDesc(s) => Box::new(StackTreeDesc::new(kid(0), kid(1), s.clone())),
        Op::StackTreeAncSrt(s) => Box::new(StackTreeAnc::new_srt(kid(0), kid(1), s.clone())),
        Op::HolisticJoin { twig, outputs } => {
            let ids = node.children.iter().map(|c| c.columns[0]).collect();
            let streams = (0..node.children.len()).map(kid).collect();
            Box::new(HolisticTwig::new(
                twig.clone(),
                ids,
                streams,
                outputs.clone(),
            ))
        }
        Op::Distinct => Box::new(Distinct {
            input: kid(0),
            last: None,
        }),
        Op::Project { keep } => Box::new(Project {
            input: kid(0),
            keep: keep.clone(),
            seen: HashSet::new(),
        }),
    };
    if check && !matches!(node.op, Op::IndexScan { .. } | Op::DocumentRoot) {
        Box::new(SortCheck {
            inner: op,
            kind: node.op.kind(),
            key: node.sort_key.clone(),
            strict: matches!(node.op, Op::Distinct),
            last: None,
        })
    } else {
        op
    }
}

struct Distinct<'a> {
    input: Input<'a>,
    last: Option<Tuple>,
}

impl TupleStream for Distinct<'_> {
    fn next(&mut self, cx: &mut ExecContext) -> Option<Tuple> {
        loop {
            let t = self.input.take(cx)?;
            if self.last.as_ref() != Some(&t) {
                self.last = Some(t.clone());
                return Some(t);
            }
        }
    }
}

struct Project<'a> {
    input: Input<'a>,
    keep: Vec<usize>,
    seen: HashSet<Tuple>,
}

impl TupleStream for Project<'_> {
    fn next(&mut self, cx: &mut ExecContext) -> Option<Tuple> {
        loop {
            let t = self.input.take(cx)?;
            let row: Tuple = self.keep.iter().map(|&k| t[k]).collect();
            if self.seen.insert(row.clone()) {
                return Some(row);
            }
        }
    }
}

/// Flags output that is out of order with respect to the declared sort key.
struct SortCheck<'a> {
    inner: BoxStream<'a>,
    kind: &'static str,
    key: Vec<usize>,
    strict: bool,
    last: Option<Vec<u32>>,
}

impl TupleStream for SortCheck<'_> {
    fn next(&mut self, cx: &mut ExecContext) -> Option<Tuple> {
        let t = self.inner.next(cx)?;
        let key: Vec<u32> = self.key.iter().map(|&k| t[k].left).collect();
        if let Some(prev) = &self.last {
            let bad = if self.strict {
                prev >= &key
            } else {
                prev > &key
            };
            if bad {
                cx.flag_violation(format!(
                    "{} emitted key {:?} after {:?}",
                    self.kind, key, prev
                ));
            }
        }
        self.last = Some(key);
        Some(t)
    }
}

/// Result selectivity: distinct labels in the output columns over the total
/// list size of the output-node tags.
pub fn compute_selectivity(query: &TwigQuery, rows: &[Tuple], idx: &InvertedIndex) -> f64 {
    let n_in: usize = query
        .output_nodes()
        .iter()
        .map(|&q| idx.list(query.tag(q)).len())
        .sum();
    if n_in == 0 {
        return 0.0;
    }
    let n_out = rows.iter().flatten().collect::<HashSet<_>>().len();
    n_out as f64 / n_in as f64
}

/// Ratio of output nodes to all query nodes.
pub fn compute_output_ratio(query: &TwigQuery) -> f64 {
    query.output_count() as f64 / query.len() as f64
}

/// Header of the statistics CSV.
pub const STATS_CSV_HEADER: [&str; 11] = [
    "query_id",
    "engine",
    "wall_ns",
    "advances",
    "getnext_calls",
    "stack_ops",
    "list_peak",
    "mu",
    "result_rows",
    "sigma",
    "rho",
];

/// One statistics CSV record, in [`STATS_CSV_HEADER`] order.
pub fn stats_record(
    query_id: &str,
    engine: &str,
    s: &ExecStats,
    sigma: f64,
    rho: f64,
) -> Vec<String> {
    vec![
        query_id.to_string(),
        engine.to_string(),
        s.wall_time.as_nanos().to_string(),
        s.advances.to_string(),
        s.getnext_calls.to_string(),
        s.stack_ops.to_string(),
        s.list_peak.to_string(),
        s.mu.to_string(),
        s.result_rows.to_string(),
        format!("{sigma:.6}"),
        format!("{rho:.6}"),
    ]
}
