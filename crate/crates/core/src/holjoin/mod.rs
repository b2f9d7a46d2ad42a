//! TwigStack-style holistic twig join.
//!
//! One operator reads the streams of all query nodes at once. A recursive
//! head-selection function (`get_next`) picks the next label to process,
//! skipping heads that cannot extend to a match of their subtree under
//! all-AD reading. Labels are kept on linked per-node stacks; each leaf
//! label yields root-to-leaf path solutions, which are merged into complete
//! matches once input is exhausted, then projected, sorted and deduplicated.

use std::collections::HashMap;

use crate::binjoin::{Input, TupleStream};
use crate::exec::ExecContext;
use crate::model::{Axis, NodeLabel, QNodeId, Tuple, TwigQuery};

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Debug)]
struct Entry {
    label: NodeLabel,
    /// Index of the parent-stack entry this one hangs under.
    parent: usize,
}

/// Holistic join over `twig`; `streams[q]` feeds twig node `q`.
///
/// Root-axis filtering is the caller's job: the root stream must already
/// hold only admissible labels.
pub struct HolisticTwig<'a> {
    twig: TwigQuery,
    /// Query-node id reported for each twig node in the push log.
    ids: Vec<QNodeId>,
    streams: Vec<Input<'a>>,
    /// Twig node per output column.
    outputs: Vec<QNodeId>,
    stacks: Vec<Vec<Entry>>,
    paths: HashMap<QNodeId, Vec<Tuple>>,
    result: Option<std::vec::IntoIter<Tuple>>,
}

impl<'a> HolisticTwig<'a> {
    pub fn new(
        twig: TwigQuery,
        ids: Vec<QNodeId>,
        streams: Vec<Input<'a>>,
        outputs: Vec<QNodeId>,
    ) -> Self {
        assert_eq!(twig.len(), streams.len(), "one stream per twig node");
        assert_eq!(twig.len(), ids.len(), "one id per twig node");
        let n = twig.len();
        HolisticTwig {
            twig,
            ids,
            streams,
            outputs,
            stacks: vec![Vec::new(); n],
            paths: HashMap::new(),
            result: None,
        }
    }

    fn head(&mut self, cx: &mut ExecContext, q: QNodeId) -> Option<NodeLabel> {
        self.streams[q].key(cx, 0)
    }

    /// Returns a twig node whose head is next to process. A returned node
    /// with a finished stream means nothing is left to process.
    fn get_next(&mut self, cx: &mut ExecContext, q: QNodeId) -> QNodeId {
        cx.getnext();
        if self.twig.is_leaf(q) {
            return q;
        }
        let children = self.twig.children(q).to_vec();
        let mut min = (u32::MAX, NONE);
        let mut max = 0u32;
        for c in children {
            let g = self.get_next(cx, c);
            let left = if g != c {
                if self.head(cx, g).is_some() {
                    return g;
                }
                // Some node under c is exhausted: c gets no new extensions.
                u32::MAX
            } else {
                self.head(cx, c).map_or(u32::MAX, |h| h.left)
            };
            if left < min.0 || min.1 == NONE {
                min = (left, c);
            }
            max = max.max(left);
        }
        while self.head(cx, q).is_some_and(|h| h.right < max) {
            self.streams[q].advance(cx);
        }
        match self.head(cx, q) {
            Some(h) if h.left < min.0 => q,
            _ => min.1,
        }
    }

    fn clean(&mut self, cx: &mut ExecContext, q: QNodeId, left: u32) {
        while self.stacks[q].last().is_some_and(|e| e.label.right < left) {
            self.stacks[q].pop();
            cx.pop(1);
        }
    }

    fn run(&mut self, cx: &mut ExecContext) -> Vec<Tuple> {
        let root = self.twig.root();
        loop {
            let g = self.get_next(cx, root);
            let Some(h) = self.head(cx, g) else { break };
            let parent = self.twig.parent(g);
            if let Some(p) = parent {
                self.clean(cx, p, h.left);
            }
            self.clean(cx, g, h.left);
            let link = match parent {
                None => Some(NONE),
                // Topmost entry that strictly contains h; a label shared by
                // both query nodes is not its own ancestor.
                Some(p) => self.stacks[p]
                    .iter()
                    .rposition(|e| e.label.left < h.left && h.right < e.label.right),
            };
            if let Some(link) = link {
                self.stacks[g].push(Entry {
                    label: h,
                    parent: link,
                });
                cx.push(1);
                cx.log_push(self.ids[g], h);
                if self.twig.is_leaf(g) {
                    self.emit_paths(cx, g);
                    self.stacks[g].pop();
                    cx.pop(1);
                }
            }
            self.streams[g].advance(cx);
        }
        for q in 0..self.stacks.len() {
            while self.stacks[q].pop().is_some() {
                cx.pop(1);
            }
        }
        self.merge(cx)
    }

    /// Path solutions ending at the top of leaf `leaf`'s stack, stored with
    /// columns ordered root first.
    fn emit_paths(&mut self, cx: &mut ExecContext, leaf: QNodeId) {
        let path = self.twig.path_from_root(leaf);
        let top = self.stacks[leaf].len() - 1;
        let mut found = Vec::new();
        let mut partial = vec![self.stacks[leaf][top].label];
        self.walk_up(&path, path.len() - 1, top, &mut partial, &mut found);
        for mut p in found {
            p.reverse();
            cx.hold(p.len());
            self.paths.entry(leaf).or_default().push(p);
        }
    }

    /// `partial` holds labels for path[pos..] in reverse; extends upward.
    fn walk_up(
        &self,
        path: &[QNodeId],
        pos: usize,
        entry: usize,
        partial: &mut Vec<NodeLabel>,
        found: &mut Vec<Tuple>,
    ) {
        if pos == 0 {
            found.push(partial.clone());
            return;
        }
        let q = path[pos];
        let p = path[pos - 1];
        let e = self.stacks[q][entry];
        let axis = self.twig.axis(q);
        for k in 0..=e.parent {
            let a = self.stacks[p][k];
            let ok = match axis {
                Axis::Ad => a.label.left < e.label.left && e.label.right < a.label.right,
                Axis::Pc => {
                    a.label.left < e.label.left
                        && e.label.right < a.label.right
                        && a.label.level + 1 == e.label.level
                }
            };
            if ok {
                partial.push(a.label);
                self.walk_up(path, pos - 1, k, partial, found);
                partial.pop();
            }
        }
    }

    /// Joins path solutions of all leaves on their shared prefixes, then
    /// projects to the output columns.
    fn merge(&mut self, cx: &mut ExecContext) -> Vec<Tuple> {
        let n = self.twig.len();
        let leaves: Vec<QNodeId> = (0..n).filter(|&q| self.twig.is_leaf(q)).collect();
        // Partial matches indexed by twig node; columns not yet bound are unused.
        let mut bound = vec![false; n];
        let mut matches: Vec<Vec<NodeLabel>> = vec![vec![NodeLabel::new(0, 0, 0); n]];
        for &leaf in &leaves {
            let path = self.twig.path_from_root(leaf);
            let sols = self.paths.remove(&leaf).unwrap_or_default();
            let released: usize = sols.iter().map(Vec::len).sum();
            let shared: Vec<usize> = (0..path.len()).filter(|&k| bound[path[k]]).collect();
            let mut by_key: HashMap<Vec<NodeLabel>, Vec<&Tuple>> = HashMap::new();
            for s in &sols {
                by_key
                    .entry(shared.iter().map(|&k| s[k]).collect())
                    .or_default()
                    .push(s);
            }
            let mut next = Vec::new();
            for m in &matches {
                let key: Vec<NodeLabel> = shared.iter().map(|&k| m[path[k]]).collect();
                if let Some(hits) = by_key.get(&key) {
                    for s in hits {
                        let mut row = m.clone();
                        for (k, &q) in path.iter().enumerate() {
                            row[q] = s[k];
                        }
                        next.push(row);
                    }
                }
            }
            cx.release(released);
            matches = next;
            for &q in &path {
                bound[q] = true;
            }
        }
        let mut rows: Vec<Tuple> = matches
            .into_iter()
            .map(|m| self.outputs.iter().map(|&q| m[q]).collect())
            .collect();
        rows.sort();
        rows.dedup();
        rows
    }
}

impl TupleStream for HolisticTwig<'_> {
    fn next(&mut self, cx: &mut ExecContext) -> Option<Tuple> {
        if self.result.is_none() {
            let rows = self.run(cx);
            self.result = Some(rows.into_iter());
        }
        self.result.as_mut().and_then(Iterator::next)
    }
}
