use std::collections::HashSet;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;

use tpq_core::exec::{compute_selectivity, ExecOptions};
use tpq_core::model::Tuple;
use tpq_core::oracle::brute_force;
use tpq_core::planner::{
    compute_cost_inputs, outputs_lca_closed, select_engine_cbj, ExactStats, HeuristicStats,
    StatisticsProvider,
};
use tpq_core::{
    build_plan, execute_with, Engine, ExecStats, InvertedIndex, Plan, QNodeId, TwigQuery,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Bj,
    Hj,
    Cj,
    /// Cost-based choice among bj, hj and cj.
    Cbj,
    /// Brute-force reference evaluation.
    Oracle,
}

impl EngineArg {
    pub fn name(self) -> &'static str {
        match self {
            EngineArg::Bj => "bj",
            EngineArg::Hj => "hj",
            EngineArg::Cj => "cj",
            EngineArg::Cbj => "cbj",
            EngineArg::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProviderArg {
    /// Run the query and its core to measure selectivities.
    Exact,
    /// Estimate from inverted-list sizes.
    Heuristic,
}

impl ProviderArg {
    fn provider(self) -> &'static dyn StatisticsProvider {
        match self {
            ProviderArg::Exact => &ExactStats,
            ProviderArg::Heuristic => &HeuristicStats,
        }
    }
}

/// Engine actually used for `arg`, or `None` for the oracle.
pub fn resolve(
    arg: EngineArg,
    query: &TwigQuery,
    idx: &InvertedIndex,
    provider: ProviderArg,
) -> Option<Engine> {
    match arg {
        EngineArg::Bj => Some(Engine::Bj),
        EngineArg::Hj => Some(Engine::Hj),
        EngineArg::Cj => Some(Engine::Cj),
        EngineArg::Oracle => None,
        EngineArg::Cbj => {
            let inputs = compute_cost_inputs(query, idx, provider.provider());
            match select_engine_cbj(&inputs) {
                // Binary joins need LCA-closed outputs; the combined engine
                // is the closest fallback.
                Engine::Bj if outputs_lca_closed(query).is_err() => Some(Engine::Cj),
                e => Some(e),
            }
        }
    }
}

/// Label name of `engine` as resolved from `arg`, e.g. `cbj:hj`.
pub fn engine_label(arg: EngineArg, resolved: Option<Engine>) -> String {
    match (arg, resolved) {
        (EngineArg::Cbj, Some(e)) => format!("cbj:{e}"),
        _ => arg.name().to_string(),
    }
}

/// Resolves `--return` items, each a query node id or the tag of exactly one
/// output node.
pub fn resolve_return(query: &TwigQuery, items: &[String]) -> Result<Vec<QNodeId>> {
    items
        .iter()
        .map(|item| {
            if let Ok(id) = item.parse::<QNodeId>() {
                if id >= query.len() || !query.is_output(id) {
                    bail!("--return {id}: not an output node of {}", query.render());
                }
                return Ok(id);
            }
            let hits: Vec<QNodeId> = query
                .output_nodes()
                .into_iter()
                .filter(|&q| query.tag(q) == item)
                .collect();
            match hits.as_slice() {
                [one] => Ok(*one),
                [] => bail!("--return {item}: no output node has this tag"),
                _ => bail!("--return {item}: several output nodes have this tag; use node ids"),
            }
        })
        .collect()
}

pub fn plan_for(query: &TwigQuery, engine: Engine, returned: &[QNodeId]) -> Result<Plan> {
    let plan = build_plan(query, engine)?;
    if returned.is_empty() {
        Ok(plan)
    } else {
        Ok(plan.with_return(returned)?)
    }
}

pub struct Evaluation {
    pub rows: Vec<Tuple>,
    pub stats: ExecStats,
    /// Selectivity of the returned columns.
    pub sigma: f64,
}

/// Evaluates `query` with `engine`, or with the oracle when `None`.
pub fn evaluate(
    query: &TwigQuery,
    idx: &InvertedIndex,
    engine: Option<Engine>,
    returned: &[QNodeId],
) -> Result<Evaluation> {
    let (rows, stats) = match engine {
        Some(e) => {
            let plan = plan_for(query, e, returned)?;
            let out = execute_with(&plan, idx, ExecOptions::default())
                .with_context(|| format!("executing {}", query.render()))?;
            (out.rows, out.stats)
        }
        None => {
            let start = Instant::now();
            let rows = project(brute_force(query, idx), query, returned);
            let stats = ExecStats {
                result_rows: rows.len() as u64,
                wall_time: start.elapsed(),
                ..ExecStats::default()
            };
            (rows, stats)
        }
    };
    let visible = if returned.is_empty() {
        query.clone()
    } else {
        query.with_outputs(returned)
    };
    let sigma = compute_selectivity(&visible, &rows, idx);
    Ok(Evaluation { rows, stats, sigma })
}

/// Keeps the `returned` columns of full output rows, first occurrence wins.
fn project(rows: Vec<Tuple>, query: &TwigQuery, returned: &[QNodeId]) -> Vec<Tuple> {
    if returned.is_empty() {
        return rows;
    }
    let outs = query.output_nodes();
    let cols: Vec<usize> = returned
        .iter()
        .map(|q| {
            outs.iter()
                .position(|o| o == q)
                .expect("returned nodes are outputs")
        })
        .collect();
    let mut seen = HashSet::new();
    rows.into_iter()
        .map(|r| cols.iter().map(|&c| r[c]).collect::<Tuple>())
        .filter(|r| seen.insert(r.clone()))
        .collect()
}

pub fn render_row(row: &[tpq_core::NodeLabel]) -> String {
    row.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("\t")
}
