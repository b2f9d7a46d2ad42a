use super::{Engine, Op, Plan, PlanError, PlanNode, DOC_ROOT};
use crate::binjoin::{JoinSpec, Mask};
use crate::model::{decompose, Axis, QNodeId, QueryDecomposition, TwigQuery};

fn scan(query: &TwigQuery, q: QNodeId) -> PlanNode {
    PlanNode {
        op: Op::IndexScan {
            tag: query.tag(q).to_string(),
        },
        children: Vec::new(),
        columns: vec![q],
        sort_key: vec![0],
    }
}

fn doc_root() -> PlanNode {
    PlanNode {
        op: Op::DocumentRoot,
        children: Vec::new(),
        columns: vec![DOC_ROOT],
        sort_key: vec![0],
    }
}

/// Semi-join keeping the side whose column is `keep`.
fn semi(op: Op, ta: PlanNode, td: PlanNode) -> PlanNode {
    let columns = match op {
        Op::SemiJoinAncAd | Op::SemiJoinAncPc => ta.columns.clone(),
        _ => td.columns.clone(),
    };
    PlanNode {
        op,
        children: vec![ta, td],
        columns,
        sort_key: vec![0],
    }
}

fn anc_semi(axis: Axis) -> Op {
    match axis {
        Axis::Ad => Op::SemiJoinAncAd,
        Axis::Pc => Op::SemiJoinAncPc,
    }
}

fn desc_semi(axis: Axis) -> Op {
    match axis {
        Axis::Ad => Op::SemiJoinDescAd,
        Axis::Pc => Op::SemiJoinDescPc,
    }
}

/// Maps input sort columns through a mask; stops at the first dropped column.
fn mapped_key(key: &[usize], mask: &Mask, offset: usize) -> (Vec<usize>, bool) {
    let mut out = Vec::new();
    for &c in key {
        if !mask.0[c] {
            return (out, false);
        }
        let pos = mask.0[..c].iter().filter(|&&b| b).count();
        out.push(offset + pos);
    }
    (out, true)
}

fn partial(op: fn(JoinSpec) -> Op, spec: JoinSpec, ta: PlanNode, td: PlanNode) -> PlanNode {
    let mut columns: Vec<QNodeId> = Vec::new();
    columns.extend(
        ta.columns
            .iter()
            .zip(&spec.ma.0)
            .filter(|(_, &k)| k)
            .map(|(c, _)| *c),
    );
    let a_kept = columns.len();
    columns.extend(
        td.columns
            .iter()
            .zip(&spec.md.0)
            .filter(|(_, &k)| k)
            .map(|(c, _)| *c),
    );
    let built = op(spec.clone());
    let sort_key = match built {
        Op::StackTreeDesc(_) => mapped_key(&td.sort_key, &spec.md, a_kept).0,
        _ => {
            let (mut key, whole) = mapped_key(&ta.sort_key, &spec.ma, 0);
            if whole {
                key.extend(mapped_key(&td.sort_key, &spec.md, a_kept).0);
            }
            key
        }
    };
    PlanNode {
        op: built,
        children: vec![ta, td],
        columns,
        sort_key,
    }
}

/// Plan emitting the document-ordered candidates of core node `q` that
/// satisfy its constraining subquery.
pub fn build_plan_cons(query: &TwigQuery, dec: &QueryDecomposition, q: QNodeId) -> PlanNode {
    cons_from(query, dec, q, q, None)
}

fn cons_from(
    query: &TwigQuery,
    dec: &QueryDecomposition,
    owner: QNodeId,
    x: QNodeId,
    came_from: Option<QNodeId>,
) -> PlanNode {
    let mut p = scan(query, x);
    for &c in query.children(x) {
        if Some(c) != came_from && dec.in_cons(owner, c) {
            let sub = cons_from(query, dec, owner, c, Some(x));
            p = semi(anc_semi(query.axis(c)), p, sub);
        }
    }
    match query.parent(x) {
        Some(par) if Some(par) != came_from && dec.in_cons(owner, par) => {
            let sub = cons_from(query, dec, owner, par, Some(x));
            p = semi(desc_semi(query.axis(x)), sub, p);
        }
        None if query.root_axis() == Axis::Pc => {
            p = semi(Op::SemiJoinDescPc, doc_root(), p);
        }
        _ => {}
    }
    p
}

/// Plan producing the output matches of the core subtree rooted at `q`,
/// columns in pre-order, lexicographically sorted.
pub fn build_plan_core(query: &TwigQuery, dec: &QueryDecomposition, q: QNodeId) -> PlanNode {
    let mut p = build_plan_cons(query, dec, q);
    for c in dec.core_children(query, q) {
        if query.is_output(c) {
            let r = build_plan_core(query, dec, c);
            let spec = JoinSpec::new(
                Mask::all(p.arity()),
                Mask::all(r.arity()),
                0,
                0,
                query.axis(c),
            );
            p = partial(Op::StackTreeAnc, spec, p, r);
            continue;
        }
        let mut r = build_plan_cons(query, dec, c);
        let mut i = 0;
        let mut d = dec
            .core_child(query, c)
            .expect("a non-output core node has a core child");
        loop {
            let s = if query.is_output(d) {
                build_plan_core(query, dec, d)
            } else {
                build_plan_cons(query, dec, d)
            };
            let spec = JoinSpec::new(
                Mask::first_only(r.arity()),
                Mask::all(s.arity()),
                i,
                0,
                query.axis(d),
            );
            r = partial(Op::StackTreeDesc, spec, r, s);
            i = 1;
            if query.is_output(d) {
                break;
            }
            d = dec
                .core_child(query, d)
                .expect("a non-output core node has a core child");
        }
        let spec = JoinSpec::new(
            Mask::all(p.arity()),
            Mask::drop_first(r.arity()),
            0,
            1,
            query.axis(c),
        )
        .with_secondary(0);
        p = partial(Op::StackTreeAncSrt, spec, p, r);
    }
    p
}

/// True iff the lowest common ancestor of any two output nodes is output.
pub fn outputs_lca_closed(query: &TwigQuery) -> Result<(), PlanError> {
    let dec = decompose(query);
    for q in dec.core_nodes() {
        if !query.is_output(q) && dec.core_children(query, q).len() != 1 {
            return Err(PlanError::NotLcaClosed(q));
        }
    }
    if !query.is_output(dec.core_root()) {
        return Err(PlanError::NotLcaClosed(dec.core_root()));
    }
    Ok(())
}

fn distinct(p: PlanNode) -> PlanNode {
    PlanNode {
        op: Op::Distinct,
        columns: p.columns.clone(),
        sort_key: p.sort_key.clone(),
        children: vec![p],
    }
}

fn holistic(query: &TwigQuery, twig: TwigQuery, streams: Vec<PlanNode>) -> PlanNode {
    let ids: Vec<QNodeId> = streams.iter().map(|s| s.columns[0]).collect();
    let outputs: Vec<QNodeId> = (0..twig.len())
        .filter(|&t| query.is_output(ids[t]))
        .collect();
    PlanNode {
        op: Op::HolisticJoin {
            twig,
            outputs: outputs.clone(),
        },
        columns: outputs.iter().map(|&t| ids[t]).collect(),
        sort_key: (0..outputs.len()).collect(),
        children: streams,
    }
}

/// Builds the plan of `engine`; result columns are the output nodes in pre-order.
pub fn build_plan(query: &TwigQuery, engine: Engine) -> Result<Plan, PlanError> {
    let dec = decompose(query);
    let root = match engine {
        Engine::Bj => {
            outputs_lca_closed(query)?;
            build_plan_core(query, &dec, dec.core_root())
        }
        Engine::Hj => {
            let streams = (0..query.len())
                .map(|q| {
                    if q == query.root() && query.root_axis() == Axis::Pc {
                        semi(Op::SemiJoinDescPc, doc_root(), scan(query, q))
                    } else {
                        scan(query, q)
                    }
                })
                .collect();
            holistic(query, query.clone(), streams)
        }
        Engine::Cj if query.output_count() == 1 => build_plan_cons(query, &dec, dec.core_root()),
        Engine::Cj => {
            let streams = dec
                .core_nodes()
                .into_iter()
                .map(|q| build_plan_cons(query, &dec, q))
                .collect();
            holistic(query, dec.core_query(query), streams)
        }
    };
    Ok(Plan {
        root: distinct(root),
        engine,
        query: query.clone(),
        returned: query.output_nodes(),
    })
}

/// Checks that every operator's inputs arrive sorted the way it consumes
/// them, so no sort is needed anywhere.
pub fn check_fp(node: &PlanNode) -> Result<(), String> {
    for c in &node.children {
        check_fp(c)?;
    }
    let need = |child: &PlanNode, col: usize, what: &str| {
        if child.sort_key.first() == Some(&col) {
            Ok(())
        } else {
            Err(format!(
                "{} expects its {what} input sorted by column {} but it is sorted by {:?}",
                node.op.kind(),
                col + 1,
                child.sort_key
            ))
        }
    };
    match &node.op {
        Op::IndexScan { .. } | Op::DocumentRoot => Ok(()),
        Op::SemiJoinAncAd | Op::SemiJoinDescAd | Op::SemiJoinAncPc | Op::SemiJoinDescPc => {
            need(&node.children[0], 0, "ancestor")?;
            need(&node.children[1], 0, "descendant")
        }
        Op::StackTreeAnc(s) | Op::StackTreeDesc(s) | Op::StackTreeAncSrt(s) => {
            need(&node.children[0], s.i, "ancestor")?;
            need(&node.children[1], s.j, "descendant")
        }
        Op::HolisticJoin { .. } => node.children.iter().try_for_each(|c| need(c, 0, "stream")),
        Op::Distinct => {
            let child = &node.children[0];
            if child.sort_key.len() == child.arity() {
                Ok(())
            } else {
                Err("Distinct needs input sorted by all columns".into())
            }
        }
        Op::Project { .. } => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_tpq;
    use crate::planner::explain::compact;

    fn core(text: &str) -> String {
        let q = parse_tpq(text).unwrap();
        let dec = decompose(&q);
        let p = build_plan_core(&q, &dec, dec.core_root());
        check_fp(&p).unwrap();
        compact(&p)
    }

    #[test]
    fn golden_core_plans() {
        assert_eq!(
            core("//$a//$b//$c/$d"),
            "StackTreeAnc[1,111,1,1,AD](IS(a), StackTreeAnc[1,11,1,1,AD](IS(b), \
             StackTreeAnc[1,1,1,1,PC](IS(c), IS(d))))"
        );
        assert_eq!(
            core("//$a//b//c/$d"),
            "StackTreeAncSrt[1,01,1,2,AD,1](IS(a), StackTreeDesc[10,1,2,1,PC](\
             StackTreeDesc[1,1,1,1,AD](IS(b), IS(c)), IS(d)))"
        );
        assert_eq!(
            core("//$a//d/$e"),
            "StackTreeAncSrt[1,01,1,2,AD,1](IS(a), StackTreeDesc[1,1,1,1,PC](IS(d), IS(e)))"
        );
    }

    #[test]
    fn introduction_core_plan() {
        assert_eq!(
            core("//r/$a[./b//$c]//$d[./e and .//f]"),
            "StackTreeAnc[11,1,1,1,AD](StackTreeAncSrt[1,01,1,2,PC,1](\
             SemiJoinDescPC(IS(r), IS(a)), StackTreeDesc[1,1,1,1,AD](IS(b), IS(c))), \
             SemiJoinAncAD(SemiJoinAncPC(IS(d), IS(e)), IS(f)))"
        );
    }

    #[test]
    fn cons_plans() {
        let q = parse_tpq("//r/$a[./b//$c]//$d[./e and .//f]").unwrap();
        let dec = decompose(&q);
        assert_eq!(
            compact(&build_plan_cons(&q, &dec, 4)),
            "SemiJoinAncAD(SemiJoinAncPC(IS(d), IS(e)), IS(f))"
        );
        assert_eq!(compact(&build_plan_cons(&q, &dec, 3)), "IS(c)");

        let q = parse_tpq("//a[.//b and ./c]/$d//e").unwrap();
        let dec = decompose(&q);
        assert_eq!(
            compact(&build_plan_cons(&q, &dec, 3)),
            "SemiJoinDescPC(SemiJoinAncPC(SemiJoinAncAD(IS(a), IS(b)), IS(c)), \
             SemiJoinAncAD(IS(d), IS(e)))"
        );

        let q = parse_tpq("/$a").unwrap();
        let dec = decompose(&q);
        assert_eq!(
            compact(&build_plan_cons(&q, &dec, 0)),
            "SemiJoinDescPC(IS(#document), IS(a))"
        );
    }

    #[test]
    fn engine_shapes() {
        let one = parse_tpq("//a[./b]//$c").unwrap();
        assert_eq!(
            build_plan(&one, Engine::Cj).unwrap().root,
            build_plan(&one, Engine::Bj).unwrap().root
        );
        let all = parse_tpq("/$a[./$b]//$c").unwrap();
        assert_eq!(
            build_plan(&all, Engine::Cj).unwrap().root,
            build_plan(&all, Engine::Hj).unwrap().root
        );
        let bj = build_plan(
            &parse_tpq("//r/$a[./b//$c]//$d[./e and .//f]").unwrap(),
            Engine::Bj,
        )
        .unwrap();
        assert_eq!(bj.root.columns, vec![1, 3, 4]);
        assert_eq!(bj.root.sort_key, vec![0, 1, 2]);
        assert_eq!(bj.root.count(&|op| matches!(op, Op::Project { .. })), 0);
    }

    #[test]
    fn lca_closure() {
        assert!(outputs_lca_closed(&parse_tpq("//a[.//$b]//$c").unwrap()).is_err());
        assert!(build_plan(&parse_tpq("//a[.//$b]//$c").unwrap(), Engine::Bj).is_err());
        assert!(build_plan(&parse_tpq("//a[.//$b]//$c").unwrap(), Engine::Hj).is_ok());
        assert!(outputs_lca_closed(&parse_tpq("//$a[.//$b]//$c").unwrap()).is_ok());
    }
}
