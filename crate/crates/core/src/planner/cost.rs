use super::{build_plan, Engine};
use crate::exec::{compute_output_ratio, compute_selectivity, execute};
use crate::ingest::InvertedIndex;
use crate::model::{decompose, TwigQuery};

pub const DEFAULT_SIGMA: f64 = 0.001;
pub const DEFAULT_SIGMA_CORE: f64 = 0.1;

/// Inputs of the cost-based engine choice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostInputs {
    /// Result selectivity of the query.
    pub sigma: f64,
    /// Result selectivity of the query core on its own.
    pub sigma_core: f64,
    /// Below this selectivity the holistic engine wins.
    pub big_sigma: f64,
    /// Above this core selectivity binary joins win.
    pub big_sigma_core: f64,
    /// Output-node ratio; informational.
    pub rho: f64,
}

impl CostInputs {
    pub fn new(sigma: f64, sigma_core: f64) -> Self {
        CostInputs {
            sigma,
            sigma_core,
            big_sigma: DEFAULT_SIGMA,
            big_sigma_core: DEFAULT_SIGMA_CORE,
            rho: 0.0,
        }
    }

    pub fn with_thresholds(mut self, big_sigma: f64, big_sigma_core: f64) -> Self {
        self.big_sigma = big_sigma;
        self.big_sigma_core = big_sigma_core;
        self
    }
}

pub fn select_engine_cbj(c: &CostInputs) -> Engine {
    if c.sigma < c.big_sigma {
        Engine::Hj
    } else if c.sigma_core > c.big_sigma_core {
        Engine::Bj
    } else {
        Engine::Cj
    }
}

/// Source of σ and σ_core for the cost-based choice.
pub trait StatisticsProvider {
    /// Returns `(σ, σ_core)`.
    fn selectivities(&self, query: &TwigQuery, idx: &InvertedIndex) -> (f64, f64);
}

/// Measures both selectivities by running the query and its core.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactStats;

/// Guesses a selectivity of min over output streams divided by their sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct HeuristicStats;

fn measured(query: &TwigQuery, idx: &InvertedIndex) -> f64 {
    let engine = if super::outputs_lca_closed(query).is_ok() {
        Engine::Bj
    } else {
        Engine::Hj
    };
    let plan = build_plan(query, engine).expect("engine accepts the query");
    let outcome = execute(&plan, idx).expect("plan runs without checks");
    compute_selectivity(query, &outcome.rows, idx)
}

impl StatisticsProvider for ExactStats {
    fn selectivities(&self, query: &TwigQuery, idx: &InvertedIndex) -> (f64, f64) {
        let core = decompose(query).core_query(query);
        (measured(query, idx), measured(&core, idx))
    }
}

fn heuristic(query: &TwigQuery, idx: &InvertedIndex) -> f64 {
    let sizes: Vec<usize> = query
        .output_nodes()
        .iter()
        .map(|&q| idx.list(query.tag(q)).len())
        .collect();
    let sum: usize = sizes.iter().sum();
    if sum == 0 {
        return 0.0;
    }
    *sizes.iter().min().expect("at least one output") as f64 / sum as f64
}

impl StatisticsProvider for HeuristicStats {
    fn selectivities(&self, query: &TwigQuery, idx: &InvertedIndex) -> (f64, f64) {
        let core = decompose(query).core_query(query);
        (heuristic(query, idx), heuristic(&core, idx))
    }
}

pub fn compute_cost_inputs(
    query: &TwigQuery,
    idx: &InvertedIndex,
    provider: &dyn StatisticsProvider,
) -> CostInputs {
    let (sigma, sigma_core) = provider.selectivities(query, idx);
    CostInputs {
        rho: compute_output_ratio(query),
        ..CostInputs::new(sigma, sigma_core)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_and_boundaries() {
        let pick = |s, sc| select_engine_cbj(&CostInputs::new(s, sc));
        assert_eq!(pick(0.0005, 0.5), Engine::Hj);
        assert_eq!(pick(0.5, 0.5), Engine::Bj);
        assert_eq!(pick(0.01, 0.05), Engine::Cj);
        assert_eq!(pick(0.001, 0.5), Engine::Bj);
        assert_eq!(pick(0.5, 0.1), Engine::Cj);
    }
}
