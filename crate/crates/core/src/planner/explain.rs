use std::fmt::Write;

use super::{Op, Plan, PlanNode, DOC_ROOT};
use crate::binjoin::JoinSpec;
use crate::model::{QNodeId, TwigQuery};

/// Indented plan rendering, one operator per line:
///
/// ```text
/// Distinct cols=<a,e> sort=<a,e>
///   StackTreeAncSrt[1,01,1,2,AD,1] cols=<a,e> sort=<a,e>
///     IndexScan(a) cols=<a> sort=<a>
///     StackTreeDesc[1,1,1,1,PC] cols=<d,e> sort=<e>
///       IndexScan(d) cols=<d> sort=<d>
///       IndexScan(e) cols=<e> sort=<e>
/// ```
///
/// Join parameters are `[M_a,M_d,i,j,α]`, plus `k` for the sorted variant;
/// column indices are 1-based.
pub fn explain(plan: &Plan) -> String {
    let mut out = String::new();
    write_node(&plan.query, &plan.root, 0, &mut out);
    out
}

fn col_name(query: &TwigQuery, q: QNodeId) -> &str {
    if q == DOC_ROOT {
        "#document"
    } else {
        query.tag(q)
    }
}

fn params(s: &JoinSpec) -> String {
    let mut p = format!("[{},{},{},{},{}", s.ma, s.md, s.i + 1, s.j + 1, s.alpha);
    if let Some(k) = s.k {
        let _ = write!(p, ",{}", k + 1);
    }
    p.push(']');
    p
}

fn head(node: &PlanNode) -> String {
    match &node.op {
        Op::IndexScan { tag } => format!("IndexScan({tag})"),
        Op::DocumentRoot => "IndexScan(#document)".to_string(),
        Op::StackTreeAnc(s) | Op::StackTreeDesc(s) | Op::StackTreeAncSrt(s) => {
            format!("{}{}", node.op.kind(), params(s))
        }
        Op::HolisticJoin { twig, .. } => format!("HolisticJoin twig={}", twig.render()),
        Op::Project { keep } => {
            let keep: Vec<String> = keep.iter().map(|k| (k + 1).to_string()).collect();
            format!("Project keep=[{}]", keep.join(","))
        }
        _ => node.op.kind().to_string(),
    }
}

fn names(query: &TwigQuery, cols: impl Iterator<Item = QNodeId>) -> String {
    cols.map(|c| col_name(query, c))
        .collect::<Vec<_>>()
        .join(",")
}

fn write_node(query: &TwigQuery, node: &PlanNode, depth: usize, out: &mut String) {
    let _ = writeln!(
        out,
        "{:indent$}{} cols=<{}> sort=<{}>",
        "",
        head(node),
        names(query, node.columns.iter().copied()),
        names(query, node.sort_key.iter().map(|&k| node.columns[k])),
        indent = 2 * depth
    );
    for c in &node.children {
        write_node(query, c, depth + 1, out);
    }
}

/// One-line rendering without column annotations, e.g.
/// `StackTreeAnc[1,1,1,1,PC](IS(c), IS(d))`.
pub fn compact(node: &PlanNode) -> String {
    let name = match &node.op {
        Op::IndexScan { tag } => return format!("IS({tag})"),
        Op::DocumentRoot => return "IS(#document)".to_string(),
        _ => head(node),
    };
    let kids: Vec<String> = node.children.iter().map(compact).collect();
    format!("{name}({})", kids.join(", "))
}
