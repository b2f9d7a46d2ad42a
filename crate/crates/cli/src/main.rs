mod bench;
mod run;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use tpq_core::exec::{compute_output_ratio, stats_record, STATS_CSV_HEADER};
use tpq_core::ingest::{gen_doc, load_index, save_index, DocShape};
use tpq_core::model::decompose;
use tpq_core::planner::{explain, predict_optimality};
use tpq_core::{parse_and_label, parse_tpq, InvertedIndex, QNodeId, TwigQuery};

use bench::{run_bench, BenchConfig};
use run::{
    engine_label, evaluate, plan_for, render_row, resolve, resolve_return, EngineArg, ProviderArg,
};

#[derive(Parser)]
#[command(
    name = "tpq",
    version,
    about = "Twig pattern queries over containment-labeled XML"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Label an XML document and write its inverted-list index.
    Index {
        xml: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Evaluate a twig query against an index.
    Query {
        idx: PathBuf,
        /// Query text, e.g. `//$a[./b]//$c`; `$` marks output nodes.
        #[arg(short, long = "query")]
        q: String,
        #[arg(long, value_enum, default_value_t = EngineArg::Bj)]
        engine: EngineArg,
        /// Print a statistics CSV header and row after the results.
        #[arg(long)]
        stats: bool,
        /// Print the plan instead of running it.
        #[arg(long)]
        explain: bool,
        /// Output nodes to return, by id or unique tag (comma separated).
        #[arg(long = "return", value_delimiter = ',')]
        ret: Vec<String>,
        /// Selectivity source for `--engine cbj`.
        #[arg(long, value_enum, default_value_t = ProviderArg::Exact)]
        provider: ProviderArg,
    },
    /// Run a query file under several engines and write a statistics CSV.
    Bench {
        idx: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Emit K variants per pattern with distinct random output-node counts.
        #[arg(long, value_name = "K")]
        randomize_outputs: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "bj,hj,cj")]
        engines: Vec<EngineArg>,
        /// Runs per case; the CSV reports the median wall time.
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, value_enum, default_value_t = ProviderArg::Exact)]
        provider: ProviderArg,
        /// Write 0 for wall_ns so repeated runs give identical files.
        #[arg(long)]
        omit_timing: bool,
    },
    /// Write a synthetic document.
    Gendoc {
        #[arg(long)]
        shape: DocShape,
        #[arg(long)]
        n: usize,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Print the query decomposition and the optimality prediction.
    Analyze {
        idx: PathBuf,
        #[arg(short, long = "query")]
        q: String,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Index { xml, out } => cmd_index(&xml, &out),
        Cmd::Query {
            idx,
            q,
            engine,
            stats,
            explain,
            ret,
            provider,
        } => cmd_query(&idx, &q, engine, stats, explain, &ret, provider),
        Cmd::Bench {
            idx,
            queries,
            out,
            randomize_outputs,
            seed,
            engines,
            reps,
            provider,
            omit_timing,
        } => {
            let index = open_index(&idx)?;
            let text = fs::read_to_string(&queries)
                .with_context(|| format!("reading {}", queries.display()))?;
            let cfg = BenchConfig {
                engines,
                repetitions: reps,
                randomize_outputs,
                seed,
                provider,
                omit_timing,
            };
            let rows = run_bench(&index, &text, &out, &cfg)?;
            println!("wrote {rows} rows to {}", out.display());
            Ok(())
        }
        Cmd::Gendoc { shape, n, out } => {
            let xml = gen_doc(shape, n)?;
            fs::write(&out, xml).with_context(|| format!("writing {}", out.display()))?;
            Ok(())
        }
        Cmd::Analyze { idx, q } => cmd_analyze(&idx, &q),
    }
}

fn open_index(path: &Path) -> Result<InvertedIndex> {
    load_index(path).with_context(|| format!("loading index {}", path.display()))
}

fn cmd_index(xml: &Path, out: &Path) -> Result<()> {
    let bytes = fs::read(xml).with_context(|| format!("reading {}", xml.display()))?;
    let idx = parse_and_label(&bytes).with_context(|| format!("parsing {}", xml.display()))?;
    save_index(&idx, out).with_context(|| format!("writing {}", out.display()))?;
    let s = idx.stats();
    let mut o = io::stdout().lock();
    writeln!(o, "nodes: {}", s.node_count)?;
    writeln!(o, "depth: {}", s.depth)?;
    let rec: Vec<&str> = s.recursive_tags.iter().map(String::as_str).collect();
    writeln!(
        o,
        "recursive tags: {}",
        if rec.is_empty() {
            "-".into()
        } else {
            rec.join(" ")
        }
    )?;
    writeln!(o, "tags:")?;
    for (tag, count) in &s.tag_counts {
        writeln!(o, "  {tag}\t{count}")?;
    }
    Ok(())
}

fn cmd_query(
    idx_path: &Path,
    text: &str,
    arg: EngineArg,
    stats: bool,
    show_plan: bool,
    ret: &[String],
    provider: ProviderArg,
) -> Result<()> {
    let query = parse_tpq(text)?;
    let returned = resolve_return(&query, ret)?;
    let idx = open_index(idx_path)?;
    let engine = resolve(arg, &query, &idx, provider);
    let mut o = io::stdout().lock();
    if show_plan {
        let Some(e) = engine else {
            bail!("the oracle has no plan to explain");
        };
        write!(o, "{}", explain(&plan_for(&query, e, &returned)?))?;
        return Ok(());
    }
    let ev = evaluate(&query, &idx, engine, &returned)?;
    for row in &ev.rows {
        writeln!(o, "{}", render_row(row))?;
    }
    if stats {
        let rec = stats_record(
            &query.render(),
            &engine_label(arg, engine),
            &ev.stats,
            ev.sigma,
            compute_output_ratio(&query),
        );
        let mut w = csv::Writer::from_writer(o);
        w.write_record(STATS_CSV_HEADER)?;
        w.write_record(&rec)?;
        w.flush()?;
    }
    Ok(())
}

fn node(q: &TwigQuery, id: QNodeId) -> String {
    format!("{}#{id}", q.tag(id))
}

fn cmd_analyze(idx_path: &Path, text: &str) -> Result<()> {
    let query = parse_tpq(text)?;
    let idx = open_index(idx_path)?;
    let dec = decompose(&query);
    let mut o = io::stdout().lock();
    writeln!(o, "query: {}", query.render())?;
    let core: Vec<String> = dec.core_nodes().iter().map(|&c| node(&query, c)).collect();
    writeln!(o, "core: {}", core.join(" "))?;
    writeln!(o, "core root: {}", node(&query, dec.core_root()))?;
    writeln!(o, "constraining subqueries:")?;
    for c in dec.core_nodes() {
        let members: Vec<String> = dec
            .cons_members(c)
            .iter()
            .map(|&m| node(&query, m))
            .collect();
        writeln!(
            o,
            "  {}: {{{}}} {}",
            node(&query, c),
            members.join(", "),
            dec.cons_query(&query, c).render()
        )?;
    }
    let report = predict_optimality(&query, &idx.stats());
    writeln!(o, "verdict: {}", report.verdict)?;
    for v in &report.violations {
        writeln!(o, "  - {v}")?;
    }
    Ok(())
}
