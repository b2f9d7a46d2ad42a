//! Brute-force reference evaluator.
//!
//! Enumerates complete matches by backtracking over the query in pre-order,
//! drawing each node's candidates from the part of its tag list that lies
//! inside the parent's interval. Shares no code with the join operators.

use std::collections::HashSet;

use crate::ingest::InvertedIndex;
use crate::model::{Axis, NodeLabel, QNodeId, Tuple, TwigQuery};

/// All complete matches: one label per query node, columns in pre-order.
pub fn complete_matches(query: &TwigQuery, idx: &InvertedIndex) -> Vec<Tuple> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(query.len());
    extend(query, idx, &mut cur, &mut |m| out.push(m.to_vec()));
    out
}

/// Output matches, sorted lexicographically and deduplicated.
pub fn brute_force(query: &TwigQuery, idx: &InvertedIndex) -> Vec<Tuple> {
    let outputs = query.output_nodes();
    let mut rows = Vec::new();
    let mut cur = Vec::with_capacity(query.len());
    extend(query, idx, &mut cur, &mut |m| {
        rows.push(outputs.iter().map(|&q| m[q]).collect::<Tuple>())
    });
    rows.sort();
    rows.dedup();
    rows
}

/// Every (query node, label) pair that occurs in some complete match.
pub fn participation(query: &TwigQuery, idx: &InvertedIndex) -> HashSet<(QNodeId, NodeLabel)> {
    let mut set = HashSet::new();
    let mut cur = Vec::with_capacity(query.len());
    extend(query, idx, &mut cur, &mut |m| {
        set.extend(m.iter().enumerate().map(|(q, l)| (q, *l)))
    });
    set
}

fn extend(
    query: &TwigQuery,
    idx: &InvertedIndex,
    cur: &mut Vec<NodeLabel>,
    emit: &mut dyn FnMut(&[NodeLabel]),
) {
    let id = cur.len();
    if id == query.len() {
        emit(cur);
        return;
    }
    let list = idx.list(query.tag(id));
    let (anchor, axis) = match query.parent(id) {
        Some(p) => (cur[p], query.axis(id)),
        None => (idx.document_label(), query.root_axis()),
    };
    // Labels sorted by left: descendants of the anchor form a contiguous run.
    let lo = list.partition_point(|l| l.left <= anchor.left);
    let hi = list.partition_point(|l| l.left < anchor.right);
    for &cand in &list[lo..hi] {
        let ok = match axis {
            Axis::Ad => anchor.left < cand.left && cand.right < anchor.right,
            Axis::Pc => {
                anchor.left < cand.left
                    && cand.right < anchor.right
                    && cand.level == anchor.level + 1
            }
        };
        if ok {
            cur.push(cand);
            extend(query, idx, cur, emit);
            cur.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{gen_doc, parse_and_label, DocShape};
    use crate::model::parse_tpq;

    const FIG1A: &str = "<r><a><b><c><c/></c></b><d><d><e/></d><e><f/></e></d></a>\
                         <a><b><b><c/></b></b><d><e/></d></a></r>";

    #[test]
    fn introduction_query() {
        let idx = parse_and_label(FIG1A.as_bytes()).unwrap();
        let q = parse_tpq("//r/$a[./b//$c]//$d[./e and .//f]").unwrap();
        let l = NodeLabel::new;
        assert_eq!(
            brute_force(&q, &idx),
            vec![
                vec![l(2, 19, 2), l(4, 7, 4), l(9, 18, 3)],
                vec![l(2, 19, 2), l(5, 6, 5), l(9, 18, 3)],
            ]
        );
    }

    #[test]
    fn unknown_tag_and_root_axis() {
        let idx = parse_and_label(FIG1A.as_bytes()).unwrap();
        assert!(brute_force(&parse_tpq("//$a//zz").unwrap(), &idx).is_empty());
        assert_eq!(brute_force(&parse_tpq("/$r").unwrap(), &idx).len(), 1);
        assert!(brute_force(&parse_tpq("/$a").unwrap(), &idx).is_empty());
        assert_eq!(brute_force(&parse_tpq("//$a").unwrap(), &idx).len(), 2);
    }

    #[test]
    fn demo2_single_tuple() {
        let idx = parse_and_label(gen_doc(DocShape::Demo, 5).unwrap().as_bytes()).unwrap();
        let q = parse_tpq("//$a//$b[.//$c]//$d").unwrap();
        let rows = brute_force(&q, &idx);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0][0], *idx.list("a").last().unwrap());
        assert_eq!(rows[0][3], idx.list("d")[0]);
    }

    #[test]
    fn complete_match_count_equals_all_output_rows() {
        let idx = parse_and_label(FIG1A.as_bytes()).unwrap();
        let q = parse_tpq("//$a//$c").unwrap();
        assert_eq!(
            complete_matches(&q, &idx).len(),
            brute_force(&q, &idx).len()
        );
        assert_eq!(participation(&q, &idx).len(), 2 + 3);
    }
}
