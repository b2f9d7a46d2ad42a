use std::path::Path;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use rand::seq::{IteratorRandom, SliceRandom};
use rand_chacha::ChaCha8Rng;

use tpq_core::exec::{compute_output_ratio, stats_record, STATS_CSV_HEADER};
use tpq_core::model::parse_pattern;
use tpq_core::planner::outputs_lca_closed;
use tpq_core::{parse_tpq, InvertedIndex, QNodeId, TwigQuery};

use crate::run::{engine_label, evaluate, resolve, EngineArg, ProviderArg};

/// One query to run under every engine of the suite.
#[derive(Clone, Debug)]
pub struct BenchCase {
    pub query_id: String,
    pub pattern: String,
    pub engines: Vec<EngineArg>,
    pub repetitions: usize,
}

/// Reads `(id, pattern)` pairs: one pattern per line, `#` starts a comment,
/// and an optional `id:` prefix names the query (default `q<line>`).
pub fn read_queries(text: &str) -> Vec<(String, String)> {
    text.lines()
        .enumerate()
        .filter_map(|(n, line)| {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                return None;
            }
            match line.split_once(':') {
                Some((id, pat)) => Some((id.trim().to_string(), pat.trim().to_string())),
                None => Some((format!("q{}", n + 1), line.to_string())),
            }
        })
        .collect()
}

fn grow_top_down(p: &TwigQuery, m: usize, rng: &mut ChaCha8Rng) -> Vec<QNodeId> {
    let mut set = vec![p.root()];
    while set.len() < m {
        let frontier: Vec<QNodeId> = set
            .iter()
            .flat_map(|&s| p.children(s).iter().copied())
            .filter(|c| !set.contains(c))
            .collect();
        set.push(
            *frontier
                .choose(rng)
                .expect("m never exceeds the pattern size"),
        );
    }
    set.sort();
    set
}

/// An LCA-closed output set of exactly `m` nodes, so every engine can run it.
fn closed_outputs(p: &TwigQuery, m: usize, rng: &mut ChaCha8Rng) -> Vec<QNodeId> {
    for _ in 0..64 {
        let mut pick: Vec<QNodeId> = (0..p.len()).choose_multiple(rng, m);
        pick.sort();
        if outputs_lca_closed(&p.with_outputs(&pick)).is_ok() {
            return pick;
        }
    }
    grow_top_down(p, m, rng)
}

/// `k` variants of `pattern`, each with a different number of output nodes.
pub fn output_variants(pattern: &TwigQuery, k: usize, rng: &mut ChaCha8Rng) -> Vec<TwigQuery> {
    let n = pattern.len();
    let mut counts: Vec<usize> = (1..=n).choose_multiple(rng, k.min(n));
    counts.sort();
    counts
        .into_iter()
        .map(|m| pattern.with_outputs(&closed_outputs(pattern, m, rng)))
        .collect()
}

pub struct BenchConfig {
    pub engines: Vec<EngineArg>,
    pub repetitions: usize,
    pub randomize_outputs: Option<usize>,
    pub seed: u64,
    pub provider: ProviderArg,
    pub omit_timing: bool,
}

pub fn cases(text: &str, cfg: &BenchConfig) -> Result<Vec<(BenchCase, TwigQuery)>> {
    let mut rng: ChaCha8Rng = rand::SeedableRng::seed_from_u64(cfg.seed);
    let mut out = Vec::new();
    for (id, pat) in read_queries(text) {
        let queries: Vec<(String, TwigQuery)> = match cfg.randomize_outputs {
            Some(k) => {
                let p = parse_pattern(&pat).with_context(|| format!("query {id}"))?;
                if k > p.len() {
                    eprintln!(
                        "warning: {id} has {} nodes; making {} variants, not {k}",
                        p.len(),
                        p.len()
                    );
                }
                output_variants(&p, k, &mut rng)
                    .into_iter()
                    .map(|q| (format!("{id}.o{}", q.output_count()), q))
                    .collect()
            }
            None => vec![(
                id.clone(),
                parse_tpq(&pat).with_context(|| format!("query {id}"))?,
            )],
        };
        for (query_id, q) in queries {
            let case = BenchCase {
                query_id,
                pattern: q.render(),
                engines: cfg.engines.clone(),
                repetitions: cfg.repetitions,
            };
            out.push((case, q));
        }
    }
    Ok(out)
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v[v.len() / 2]
}

pub fn run_bench(
    idx: &InvertedIndex,
    queries: &str,
    out: &Path,
    cfg: &BenchConfig,
) -> Result<usize> {
    if cfg.repetitions == 0 {
        bail!("--reps must be at least 1");
    }
    let mut w =
        csv::Writer::from_path(out).with_context(|| format!("writing {}", out.display()))?;
    let mut header: Vec<&str> = STATS_CSV_HEADER.to_vec();
    header.insert(1, "pattern");
    w.write_record(&header)?;
    let mut rows = 0;
    for (case, q) in cases(queries, cfg)? {
        let rho = compute_output_ratio(&q);
        for &arg in &case.engines {
            let engine = resolve(arg, &q, idx, cfg.provider);
            let mut times = Vec::with_capacity(case.repetitions);
            let mut last = None;
            for _ in 0..case.repetitions {
                let ev = match evaluate(&q, idx, engine, &[]) {
                    Ok(ev) => ev,
                    Err(e) => {
                        eprintln!("skipping {} under {}: {e:#}", case.query_id, arg.name());
                        break;
                    }
                };
                times.push(ev.stats.wall_time);
                last = Some(ev);
            }
            let Some(mut ev) = last else { continue };
            ev.stats.wall_time = if cfg.omit_timing {
                Duration::ZERO
            } else {
                median(times)
            };
            let mut rec = stats_record(
                &case.query_id,
                &engine_label(arg, engine),
                &ev.stats,
                ev.sigma,
                rho,
            );
            rec.insert(1, case.pattern.clone());
            w.write_record(&rec)?;
            rows += 1;
        }
    }
    w.flush()?;
    Ok(rows)
}
