use std::collections::VecDeque;

use super::{Input, TupleStream};
use crate::exec::ExecContext;
use crate::model::{rel_ad, NodeLabel, Tuple};

/// Emits each ancestor-side label that has a descendant in `T_d`. Stack-less.
pub struct SemiJoinAncAd<'a> {
    ta: Input<'a>,
    td: Input<'a>,
}

impl<'a> SemiJoinAncAd<'a> {
    pub fn new(ta: Input<'a>, td: Input<'a>) -> Self {
        SemiJoinAncAd { ta, td }
    }
}

impl TupleStream for SemiJoinAncAd<'_> {
    fn next(&mut self, cx: &mut ExecContext) -> Option<Tuple> {
        loop {
            let a = self.ta.key(cx, 0)?;
            let d = self.td.key(cx, 0)?;
            if a.left >= d.left {
                self.td.advance(cx);
            } else if a.right > d.right {
                return self.ta.take(cx);
            } else {
                self.ta.advance(cx);
            }
        }
    }
}

/// Emits each descendant-side label that has an ancestor in `T_a`. Stack-less.
pub struct SemiJoinDescAd<'a> {
    ta: Input<'a>,
    td: Input<'a>,
}

impl<'a> SemiJoinDescAd<'a> {
    pub fn new(ta: Input<'a>, td: Input<'a>) -> Self {
        SemiJoinDescAd { ta, td }
    }
}

impl TupleStream for SemiJoinDescAd<'_> {
    fn next(&mut self, cx: &mut ExecContext) -> Option<Tuple> {
        loop {
            let a = self.ta.key(cx, 0)?;
            let d = self.td.key(cx, 0)?;
            if rel_ad(&a, &d) {
                return self.td.take(cx);
            } else if a.left >= d.left {
                self.td.advance(cx);
            } else {
                self.ta.advance(cx);
            }
        }
    }
}

/// Emits each descendant-side label whose parent is in `T_a`.
pub struct SemiJoinDescPc<'a> {
    ta: Input<'a>,
    td: Input<'a>,
    stack: Vec<NodeLabel>,
    done: bool,
}

impl<'a> SemiJoinDescPc<'a> {
    pub fn new(ta: Input<'a>, td: Input<'a>) -> Self {
        SemiJoinDescPc {
            ta,
            td,
            stack: Vec::new(),
            done: false,
        }
    }

    fn pop_before(&mut self, cx: &mut ExecContext, left: u32) {
        while self.stack.last().is_some_and(|t| t.right < left) {
            self.stack.pop();
            cx.pop(1);
        }
    }

    fn finish(&mut self, cx: &mut ExecContext) -> Option<Tuple> {
        self.pop_before(cx, u32::MAX);
        self.done = true;
        None
    }
}

impl TupleStream for SemiJoinDescPc<'_> {
    fn next(&mut self, cx: &mut ExecContext) -> Option<Tuple> {
        if self.done {
            return None;
        }
        loop {
            let Some(d) = self.td.key(cx, 0) else {
                return self.finish(cx);
            };
            match self.ta.key(cx, 0) {
                Some(a) if a.left < d.left => {
                    self.pop_before(cx, a.left);
                    self.stack.push(a);
                    cx.push(1);
                    self.ta.advance(cx);
                }
                a => {
                    if a.is_none() && self.stack.is_empty() {
                        return self.finish(cx);
                    }
                    self.pop_before(cx, d.left);
                    // Entries left on the stack all contain d; only the
                    // innermost can sit one level above it.
                    let hit = self
                        .stack
                        .last()
                        .is_some_and(|t| t.level + 1 == d.level && rel_ad(t, &d));
                    if hit {
                        return self.td.take(cx);
                    }
                    self.td.advance(cx);
                }
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Resolution {
    Open,
    Matched,
    Dead,
}

struct Pending {
    label: NodeLabel,
    state: Resolution,
    /// Popped while a label ahead of it was still unresolved.
    counted: bool,
}

/// Emits each ancestor-side label that has a child in `T_d`.
///
/// An inner stacked label can match before an outer one is resolved, so
/// labels wait in a push-ordered pending queue and leave it from the front
/// once resolved.
pub struct SemiJoinAncPc<'a> {
    ta: Input<'a>,
    td: Input<'a>,
    /// (sequence number, label) of stacked entries.
    stack: Vec<(u64, NodeLabel)>,
    pending: VecDeque<Pending>,
    /// Sequence number of `pending[0]`.
    base: u64,
    done: bool,
}

impl<'a> SemiJoinAncPc<'a> {
    pub fn new(ta: Input<'a>, td: Input<'a>) -> Self {
        SemiJoinAncPc {
            ta,
            td,
            stack: Vec::new(),
            pending: VecDeque::new(),
            base: 0,
            done: false,
        }
    }

    fn pop_before(&mut self, cx: &mut ExecContext, left: u32) {
        while let Some(&(seq, top)) = self.stack.last() {
            if top.right >= left {
                break;
            }
            self.stack.pop();
            cx.pop(1);
            if seq >= self.base {
                let p = &mut self.pending[(seq - self.base) as usize];
                if p.state == Resolution::Open {
                    p.state = Resolution::Dead;
                }
                if seq > self.base {
                    p.counted = true;
                    cx.list_add(1);
                }
            }
        }
    }

    /// Removes resolved entries from the front; returns the first match.
    fn drain(&mut self, cx: &mut ExecContext) -> Option<Tuple> {
        while let Some(front) = self.pending.front() {
            let state = front.state;
            if state == Resolution::Open {
                return None;
            }
            let p = self.pending.pop_front().expect("front exists");
            self.base += 1;
            if p.counted {
                cx.list_remove(1);
            }
            if state == Resolution::Matched {
                return Some(vec![p.label]);
            }
        }
        None
    }
}

impl TupleStream for SemiJoinAncPc<'_> {
    fn next(&mut self, cx: &mut ExecContext) -> Option<Tuple> {
        loop {
            if let Some(out) = self.drain(cx) {
                return Some(out);
            }
            if self.done {
                return None;
            }
            let Some(d) = self.td.key(cx, 0) else {
                self.pop_before(cx, u32::MAX);
                self.done = true;
                continue;
            };
            match self.ta.key(cx, 0) {
                Some(a) if a.left < d.left => {
                    self.pop_before(cx, a.left);
                    let seq = self.base + self.pending.len() as u64;
                    self.stack.push((seq, a));
                    cx.push(1);
                    self.pending.push_back(Pending {
                        label: a,
                        state: Resolution::Open,
                        counted: false,
                    });
                    self.ta.advance(cx);
                }
                a => {
                    if a.is_none() && self.stack.is_empty() {
                        self.done = true;
                        continue;
                    }
                    self.pop_before(cx, d.left);
                    if let Some(&(seq, top)) = self.stack.last() {
                        if top.level + 1 == d.level && rel_ad(&top, &d) && seq >= self.base {
                            self.pending[(seq - self.base) as usize].state = Resolution::Matched;
                        }
                    }
                    self.td.advance(cx);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binjoin::testutil::{fig1a, rows, scan};
    use crate::binjoin::{collect, BoxStream, VecStream};

    fn run<'a>(
        make: impl FnOnce(Input<'a>, Input<'a>) -> BoxStream<'a>,
        a: BoxStream<'a>,
        d: BoxStream<'a>,
    ) -> Vec<(u32, u32)> {
        let mut cx = ExecContext::new();
        let s = make(Input::new(a), Input::new(d));
        rows(&collect(s, &mut cx))
            .into_iter()
            .map(|r| r[0])
            .collect()
    }

    #[test]
    fn anc_ad() {
        let idx = fig1a();
        let f = |a, d| Box::new(SemiJoinAncAd::new(a, d)) as BoxStream<'_>;
        assert_eq!(run(f, scan(&idx, "d"), scan(&idx, "f")), vec![(9, 18)]);
        assert_eq!(run(f, scan(&idx, "a"), scan(&idx, "f")), vec![(2, 19)]);
        assert!(run(f, scan(&idx, "zz"), scan(&idx, "f")).is_empty());
    }

    #[test]
    fn desc_ad() {
        let idx = fig1a();
        let f = |a, d| Box::new(SemiJoinDescAd::new(a, d)) as BoxStream<'_>;
        assert_eq!(
            run(f, scan(&idx, "b"), scan(&idx, "c")),
            vec![(4, 7), (5, 6), (23, 24)]
        );
        assert!(run(f, scan(&idx, "b"), scan(&idx, "zz")).is_empty());
        let l = |x, y| vec![NodeLabel::new(x, y, 1)];
        let nested = Box::new(VecStream::new(vec![l(1, 100), l(2, 3)]));
        let d = Box::new(VecStream::new(vec![l(50, 51)]));
        assert_eq!(run(f, nested, d), vec![(50, 51)]);
    }

    #[test]
    fn pc_variants() {
        let idx = fig1a();
        let anc = |a, d| Box::new(SemiJoinAncPc::new(a, d)) as BoxStream<'_>;
        let desc = |a, d| Box::new(SemiJoinDescPc::new(a, d)) as BoxStream<'_>;
        assert_eq!(
            run(anc, scan(&idx, "d"), scan(&idx, "e")),
            vec![(9, 18), (10, 13), (27, 30)]
        );
        assert_eq!(
            run(desc, scan(&idx, "r"), scan(&idx, "a")),
            vec![(2, 19), (20, 31)]
        );
        assert_eq!(run(anc, scan(&idx, "c"), scan(&idx, "c")), vec![(4, 7)]);
        assert_eq!(run(desc, scan(&idx, "b"), scan(&idx, "b")), vec![(22, 25)]);
        assert!(run(anc, scan(&idx, "zz"), scan(&idx, "e")).is_empty());
        assert!(run(desc, scan(&idx, "r"), scan(&idx, "zz")).is_empty());
    }

    #[test]
    fn anc_pc_outer_resolves_after_inner() {
        // The outer b matches only after the inner b has matched.
        let idx = crate::ingest::parse_and_label(b"<r><b><b><c/></b><c/></b></r>").unwrap();
        let anc = |a, d| Box::new(SemiJoinAncPc::new(a, d)) as BoxStream<'_>;
        assert_eq!(
            run(anc, scan(&idx, "b"), scan(&idx, "c")),
            vec![(2, 9), (3, 6)]
        );
    }
}
