#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tpq_core::model::{Axis, NodeSpec, QNodeId, TwigQuery};

pub const TAGS: [&str; 4] = ["a", "b", "c", "d"];

pub const FIG1A: &str = "<r><a><b><c><c/></c></b><d><d><e/></d><e><f/></e></d></a>\
                         <a><b><b><c/></b></b><d><e/></d></a></r>";

/// Random document over the 4-tag alphabet with at most `max_nodes` elements
/// and depth at most `max_depth`.
pub fn random_doc(rng: &mut ChaCha8Rng, max_nodes: usize, max_depth: usize) -> String {
    let target = rng.gen_range(1..=max_nodes);
    let mut budget = target - 1;
    let mut out = String::new();
    let tag = *TAGS.choose(rng).unwrap();
    grow(rng, tag, 1, max_depth, &mut budget, &mut out);
    out
}

fn grow(
    rng: &mut ChaCha8Rng,
    tag: &str,
    depth: usize,
    max_depth: usize,
    budget: &mut usize,
    out: &mut String,
) {
    out.push('<');
    out.push_str(tag);
    out.push('>');
    if depth < max_depth {
        let fanout = rng.gen_range(0..=4);
        for _ in 0..fanout {
            if *budget == 0 {
                break;
            }
            *budget -= 1;
            let child = *TAGS.choose(rng).unwrap();
            grow(rng, child, depth + 1, max_depth, budget, out);
        }
    }
    out.push_str("</");
    out.push_str(tag);
    out.push('>');
}

fn random_axis(rng: &mut ChaCha8Rng) -> Axis {
    if rng.gen_bool(0.5) {
        Axis::Ad
    } else {
        Axis::Pc
    }
}

/// Random query pattern with up to `max_nodes` nodes and no outputs marked.
pub fn random_pattern(rng: &mut ChaCha8Rng, max_nodes: usize, ad_only: bool) -> TwigQuery {
    let n = rng.gen_range(1..=max_nodes);
    let axis = |rng: &mut ChaCha8Rng| if ad_only { Axis::Ad } else { random_axis(rng) };
    let mut parents = vec![usize::MAX];
    for id in 1..n {
        parents.push(rng.gen_range(0..id));
    }
    let mut specs: Vec<NodeSpec> = (0..n)
        .map(|_| NodeSpec::new(*TAGS.choose(rng).unwrap(), false, axis(rng)))
        .collect();
    for id in (1..n).rev() {
        let s = specs.pop().unwrap();
        debug_assert_eq!(specs.len(), id);
        let p = parents[id];
        specs[p].children.insert(0, s);
    }
    TwigQuery::pattern_from_spec(specs.pop().unwrap())
}

/// Lowest common ancestor of two query nodes.
pub fn lca(q: &TwigQuery, a: QNodeId, b: QNodeId) -> QNodeId {
    let pa = q.path_from_root(a);
    let pb = q.path_from_root(b);
    let mut last = 0;
    for (x, y) in pa.iter().zip(&pb) {
        if x != y {
            break;
        }
        last = *x;
    }
    last
}

/// Closes an output set under lowest common ancestors.
pub fn lca_closure(q: &TwigQuery, outputs: &[QNodeId]) -> Vec<QNodeId> {
    let mut set: Vec<QNodeId> = outputs.to_vec();
    loop {
        let mut added = false;
        for i in 0..set.len() {
            for j in i + 1..set.len() {
                let l = lca(q, set[i], set[j]);
                if !set.contains(&l) {
                    set.push(l);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    set.sort();
    set
}

/// Random query with a random non-empty, LCA-closed output set.
pub fn random_query(rng: &mut ChaCha8Rng, max_nodes: usize, ad_only: bool) -> TwigQuery {
    let p = random_pattern(rng, max_nodes, ad_only);
    let k = rng.gen_range(1..=p.len());
    let mut ids: Vec<QNodeId> = (0..p.len()).collect();
    ids.shuffle(rng);
    ids.truncate(k);
    p.with_outputs(&lca_closure(&p, &ids))
}
