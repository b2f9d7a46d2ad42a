//! Plan construction for the three engines, the cost-based engine choice and
//! the static optimality predictor.

mod build;
mod cost;
mod explain;
mod optimality;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::binjoin::JoinSpec;
use crate::model::{QNodeId, TwigQuery};

pub use build::{build_plan, build_plan_cons, build_plan_core, check_fp, outputs_lca_closed};
pub use cost::{
    compute_cost_inputs, select_engine_cbj, CostInputs, ExactStats, HeuristicStats,
    StatisticsProvider, DEFAULT_SIGMA, DEFAULT_SIGMA_CORE,
};
pub use explain::{compact as explain_compact, explain};
pub use optimality::{predict_optimality, OptimalityReport, Verdict, Violation};

/// Column id used for the virtual document root.
pub const DOC_ROOT: QNodeId = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Engine {
    /// Fully-pipelined binary joins.
    Bj,
    /// One holistic join over the whole query.
    Hj,
    /// Semi-joins for constraining subqueries feeding a holistic join over the core.
    Cj,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Bj => "bj",
            Engine::Hj => "hj",
            Engine::Cj => "cj",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = PlanError;

    fn from_str(s: &str) -> Result<Self, PlanError> {
        match s {
            "bj" => Ok(Engine::Bj),
            "hj" => Ok(Engine::Hj),
            "cj" => Ok(Engine::Cj),
            other => Err(PlanError::UnknownEngine(other.to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error(
        "output nodes are not closed under lowest common ancestor \
         (node {0} joins output branches but is not output)"
    )]
    NotLcaClosed(QNodeId),
    #[error("returned node {0} is not an output node")]
    NotOutput(QNodeId),
    #[error("unknown engine '{0}'")]
    UnknownEngine(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op {
    IndexScan {
        tag: String,
    },
    /// Single label of the virtual document root.
    DocumentRoot,
    SemiJoinAncAd,
    SemiJoinDescAd,
    SemiJoinAncPc,
    SemiJoinDescPc,
    StackTreeAnc(JoinSpec),
    StackTreeDesc(JoinSpec),
    StackTreeAncSrt(JoinSpec),
    /// Holistic join over `twig`; child `q` feeds twig node `q`, and
    /// `outputs` are the twig nodes of the output columns.
    HolisticJoin {
        twig: TwigQuery,
        outputs: Vec<QNodeId>,
    },
    /// Adjacent-duplicate elimination.
    Distinct,
    /// Keeps the listed input columns and drops rows already emitted.
    Project {
        keep: Vec<usize>,
    },
}

impl Op {
    pub fn kind(&self) -> &'static str {
        match self {
            Op::IndexScan { .. } | Op::DocumentRoot => "IndexScan",
            Op::SemiJoinAncAd => "SemiJoinAncAD",
            Op::SemiJoinDescAd => "SemiJoinDescAD",
            Op::SemiJoinAncPc => "SemiJoinAncPC",
            Op::SemiJoinDescPc => "SemiJoinDescPC",
            Op::StackTreeAnc(_) => "StackTreeAnc",
            Op::StackTreeDesc(_) => "StackTreeDesc",
            Op::StackTreeAncSrt(_) => "StackTreeAncSrt",
            Op::HolisticJoin { .. } => "HolisticJoin",
            Op::Distinct => "Distinct",
            Op::Project { .. } => "Project",
        }
    }

    /// Operators that keep a stack or buffered lists.
    pub fn is_stateful(&self) -> bool {
        matches!(
            self,
            Op::SemiJoinAncPc
                | Op::SemiJoinDescPc
                | Op::StackTreeAnc(_)
                | Op::StackTreeDesc(_)
                | Op::StackTreeAncSrt(_)
                | Op::HolisticJoin { .. }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanNode {
    pub op: Op,
    pub children: Vec<PlanNode>,
    /// Query node of each emitted column.
    pub columns: Vec<QNodeId>,
    /// Column positions the output is lexicographically sorted by.
    pub sort_key: Vec<usize>,
}

impl PlanNode {
    pub fn arity(&self) -> usize {
        self.columns.len()
    }

    pub fn count(&self, pred: &dyn Fn(&Op) -> bool) -> usize {
        usize::from(pred(&self.op)) + self.children.iter().map(|c| c.count(pred)).sum::<usize>()
    }

    pub fn stateful_count(&self) -> usize {
        self.count(&Op::is_stateful)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan {
    pub root: PlanNode,
    pub engine: Engine,
    pub query: TwigQuery,
    /// Query nodes of the result columns.
    pub returned: Vec<QNodeId>,
}

impl Plan {
    /// Restricts the result to `nodes`, which must be output nodes.
    /// Rows keep the order of the full output match.
    pub fn with_return(mut self, nodes: &[QNodeId]) -> Result<Plan, PlanError> {
        let keep = nodes
            .iter()
            .map(|&q| {
                self.root
                    .columns
                    .iter()
                    .position(|&c| c == q)
                    .ok_or(PlanError::NotOutput(q))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if keep.len() == self.root.arity() && keep.iter().enumerate().all(|(i, &k)| i == k) {
            return Ok(self);
        }
        let sorted_prefix = keep.iter().enumerate().all(|(i, &k)| i == k);
        let sort_key = if sorted_prefix {
            (0..keep.len()).collect()
        } else {
            Vec::new()
        };
        let root = std::mem::replace(
            &mut self.root,
            PlanNode {
                op: Op::Distinct,
                children: Vec::new(),
                columns: Vec::new(),
                sort_key: Vec::new(),
            },
        );
        self.root = PlanNode {
            op: Op::Project { keep },
            columns: nodes.to_vec(),
            sort_key,
            children: vec![root],
        };
        self.returned = nodes.to_vec();
        Ok(self)
    }
}
