use std::collections::VecDeque;

use super::{Input, JoinSpec, TupleStream};
use crate::exec::ExecContext;
use crate::model::{Axis, Tuple};

/// Descendant-sorted partial-join.
///
/// Output is ordered by the descendant join column; among equal descendants,
/// by ancestor tuple order.
pub struct StackTreeDesc<'a> {
    ta: Input<'a>,
    td: Input<'a>,
    spec: JoinSpec,
    stack: Vec<Tuple>,
    /// Descendant tuple being joined and the next stack position to test.
    emitting: Option<(Tuple, usize)>,
    done: bool,
}

impl<'a> StackTreeDesc<'a> {
    pub fn new(ta: Input<'a>, td: Input<'a>, spec: JoinSpec) -> Self {
        StackTreeDesc {
            ta,
            td,
            spec,
            stack: Vec::new(),
            emitting: None,
            done: false,
        }
    }

    fn pop_before(&mut self, cx: &mut ExecContext, left: u32) {
        let i = self.spec.i;
        while self.stack.last().is_some_and(|t| t[i].right < left) {
            let t = self.stack.pop().expect("non-empty");
            cx.pop(t.len());
        }
    }

    fn finish(&mut self, cx: &mut ExecContext) -> Option<Tuple> {
        self.pop_before(cx, u32::MAX);
        self.done = true;
        None
    }
}

impl TupleStream for StackTreeDesc<'_> {
    fn next(&mut self, cx: &mut ExecContext) -> Option<Tuple> {
        let (i, j) = (self.spec.i, self.spec.j);
        loop {
            if let Some((d, pos)) = &mut self.emitting {
                while *pos < self.stack.len() {
                    let a = &self.stack[*pos];
                    *pos += 1;
                    if self.spec.alpha.holds(&a[i], &d[j]) {
                        return Some(self.spec.project(a, d));
                    }
                }
                self.emitting = None;
            }
            if self.done {
                return None;
            }
            let Some(d) = self.td.key(cx, j) else {
                return self.finish(cx);
            };
            match self.ta.key(cx, i) {
                Some(a) if a.left < d.left => {
                    self.pop_before(cx, a.left);
                    let t = self.ta.take(cx).expect("head exists");
                    cx.push(t.len());
                    self.stack.push(t);
                }
                a => {
                    if a.is_none() && self.stack.is_empty() {
                        return self.finish(cx);
                    }
                    self.pop_before(cx, d.left);
                    let t = self.td.take(cx).expect("head exists");
                    self.emitting = Some((t, 0));
                }
            }
        }
    }
}

struct AncEntry {
    tuple: Tuple,
    self_list: Vec<Tuple>,
    inherited: Vec<Tuple>,
}

/// Ancestor-sorted partial-join, optionally with a secondary relationship
/// test (the `Srt` variant).
///
/// Output is ordered by the ancestor join column; among equal ancestors, by
/// descendant tuple order. Pairs of the bottom stack entry are emitted at
/// once; pairs of entries above it wait in self- and inherited-lists until
/// every entry below has been popped.
pub struct StackTreeAnc<'a> {
    ta: Input<'a>,
    td: Input<'a>,
    spec: JoinSpec,
    stack: Vec<AncEntry>,
    /// Pairs of the bottom entry, emitted without buffering.
    direct: VecDeque<Tuple>,
    /// Lists released by popping the bottom entry; still counted as lists.
    flush: VecDeque<Tuple>,
    /// Last emitted tuple, for duplicate elimination in the `Srt` variant.
    last: Option<Tuple>,
    done: bool,
}

impl<'a> StackTreeAnc<'a> {
    pub fn new(ta: Input<'a>, td: Input<'a>, spec: JoinSpec) -> Self {
        StackTreeAnc {
            ta,
            td,
            spec,
            stack: Vec::new(),
            direct: VecDeque::new(),
            flush: VecDeque::new(),
            last: None,
            done: false,
        }
    }

    /// The sorted variant: AD on columns `i`/`j`, then `alpha` between
    /// column `i` and secondary column `k`.
    pub fn new_srt(ta: Input<'a>, td: Input<'a>, spec: JoinSpec) -> Self {
        assert!(
            spec.k.is_some(),
            "the sorted variant needs a secondary column"
        );
        Self::new(ta, td, spec)
    }

    fn pop_before(&mut self, cx: &mut ExecContext, left: u32) {
        let i = self.spec.i;
        while self.stack.last().is_some_and(|e| e.tuple[i].right < left) {
            let mut e = self.stack.pop().expect("non-empty");
            cx.pop(e.tuple.len());
            match self.stack.last_mut() {
                Some(top) => {
                    top.inherited.append(&mut e.self_list);
                    top.inherited.append(&mut e.inherited);
                }
                None => {
                    self.flush.extend(e.self_list);
                    self.flush.extend(e.inherited);
                }
            }
        }
    }

    fn join(&mut self, cx: &mut ExecContext, d: &Tuple) {
        let (i, j) = (self.spec.i, self.spec.j);
        for (pos, e) in self.stack.iter_mut().enumerate() {
            let a = &e.tuple[i];
            let ok = match self.spec.k {
                None => self.spec.alpha.holds(a, &d[j]),
                Some(k) => Axis::Ad.holds(a, &d[j]) && self.spec.alpha.holds(a, &d[k]),
            };
            if !ok {
                continue;
            }
            let out = self.spec.project(&e.tuple, d);
            if pos == 0 {
                self.direct.push_back(out);
            } else {
                cx.list_add(out.len());
                e.self_list.push(out);
            }
        }
    }

    fn step(&mut self, cx: &mut ExecContext) -> Option<Tuple> {
        loop {
            if let Some(t) = self.flush.pop_front() {
                cx.list_remove(t.len());
                return Some(t);
            }
            if let Some(t) = self.direct.pop_front() {
                return Some(t);
            }
            if self.done {
                return None;
            }
            let Some(d) = self.td.key(cx, self.spec.j) else {
                self.pop_before(cx, u32::MAX);
                self.done = true;
                continue;
            };
            match self.ta.key(cx, self.spec.i) {
                Some(a) if a.left < d.left => {
                    self.pop_before(cx, a.left);
                    let t = self.ta.take(cx).expect("head exists");
                    cx.push(t.len());
                    self.stack.push(AncEntry {
                        tuple: t,
                        self_list: Vec::new(),
                        inherited: Vec::new(),
                    });
                }
                a => {
                    if a.is_none() && self.stack.is_empty() {
                        self.done = true;
                        continue;
                    }
                    self.pop_before(cx, d.left);
                    let t = self.td.take(cx).expect("head exists");
                    self.join(cx, &t);
                }
            }
        }
    }
}

impl TupleStream for StackTreeAnc<'_> {
    fn next(&mut self, cx: &mut ExecContext) -> Option<Tuple> {
        if self.spec.k.is_none() {
            return self.step(cx);
        }
        // Dropping the chain-head column can repeat a row; repeats are adjacent.
        loop {
            let t = self.step(cx)?;
            if self.last.as_ref() != Some(&t) {
                self.last = Some(t.clone());
                return Some(t);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binjoin::testutil::{fig1a, rows, scan};
    use crate::binjoin::{collect, Mask};

    fn pc(ma: usize, md: usize) -> JoinSpec {
        JoinSpec::new(Mask::all(ma), Mask::all(md), 0, 0, Axis::Pc)
    }

    #[test]
    fn anc_chain_tables() {
        let idx = fig1a();
        let mut cx = ExecContext::new();
        let de = StackTreeAnc::new(
            Input::new(scan(&idx, "d")),
            Input::new(scan(&idx, "e")),
            pc(1, 1),
        );
        let got = collect(de, &mut cx);
        assert_eq!(
            rows(&got),
            vec![
                vec![(9, 18), (14, 17)],
                vec![(10, 13), (11, 12)],
                vec![(27, 30), (28, 29)],
            ]
        );

        let de = StackTreeAnc::new(
            Input::new(scan(&idx, "d")),
            Input::new(scan(&idx, "e")),
            pc(1, 1),
        );
        let spec = JoinSpec::new(Mask::all(1), Mask::all(2), 0, 0, Axis::Ad);
        let ade = StackTreeAnc::new(Input::new(scan(&idx, "a")), Input::new(Box::new(de)), spec);
        let got = collect(ade, &mut cx);
        assert_eq!(
            rows(&got),
            vec![
                vec![(2, 19), (9, 18), (14, 17)],
                vec![(2, 19), (10, 13), (11, 12)],
                vec![(20, 31), (27, 30), (28, 29)],
            ]
        );
    }

    #[test]
    fn desc_table() {
        let idx = fig1a();
        let mut cx = ExecContext::new();
        let de = StackTreeDesc::new(
            Input::new(scan(&idx, "d")),
            Input::new(scan(&idx, "e")),
            pc(1, 1),
        );
        assert_eq!(
            rows(&collect(de, &mut cx)),
            vec![
                vec![(10, 13), (11, 12)],
                vec![(9, 18), (14, 17)],
                vec![(27, 30), (28, 29)],
            ]
        );
        let af = StackTreeDesc::new(
            Input::new(scan(&idx, "a")),
            Input::new(scan(&idx, "f")),
            JoinSpec::new(Mask::all(1), Mask::all(1), 0, 0, Axis::Ad),
        );
        assert_eq!(rows(&collect(af, &mut cx)), vec![vec![(2, 19), (15, 16)]]);
    }

    #[test]
    fn srt_drops_chain_head_and_keeps_order() {
        let idx = fig1a();
        let mut cx = ExecContext::new();
        let de = StackTreeDesc::new(
            Input::new(scan(&idx, "d")),
            Input::new(scan(&idx, "e")),
            pc(1, 1),
        );
        let spec =
            JoinSpec::new(Mask::all(1), Mask::drop_first(2), 0, 1, Axis::Ad).with_secondary(0);
        let srt =
            StackTreeAnc::new_srt(Input::new(scan(&idx, "a")), Input::new(Box::new(de)), spec);
        assert_eq!(
            rows(&collect(srt, &mut cx)),
            vec![
                vec![(2, 19), (11, 12)],
                vec![(2, 19), (14, 17)],
                vec![(20, 31), (28, 29)],
            ]
        );
    }

    #[test]
    fn srt_secondary_test_rejects() {
        let idx = fig1a();
        let mut cx = ExecContext::new();
        let ad = JoinSpec::new(Mask::all(1), Mask::all(1), 0, 0, Axis::Ad);
        let bc = StackTreeDesc::new(Input::new(scan(&idx, "b")), Input::new(scan(&idx, "c")), ad);
        let spec = JoinSpec::new(Mask::all(1), Mask::all(2), 0, 1, Axis::Pc).with_secondary(0);
        let srt =
            StackTreeAnc::new_srt(Input::new(scan(&idx, "a")), Input::new(Box::new(bc)), spec);
        let got = collect(srt, &mut cx);
        // (a2, b3, c3) fails the PC test between a2 and b3
        assert_eq!(
            rows(&got),
            vec![
                vec![(2, 19), (3, 8), (4, 7)],
                vec![(2, 19), (3, 8), (5, 6)],
                vec![(20, 31), (21, 26), (23, 24)],
            ]
        );
    }

    #[test]
    fn empty_inputs() {
        let idx = fig1a();
        let mut cx = ExecContext::new();
        for (a, d) in [("zz", "e"), ("d", "zz")] {
            let s = StackTreeAnc::new(
                Input::new(scan(&idx, a)),
                Input::new(scan(&idx, d)),
                pc(1, 1),
            );
            assert!(collect(s, &mut cx).is_empty());
            let s = StackTreeDesc::new(
                Input::new(scan(&idx, a)),
                Input::new(scan(&idx, d)),
                pc(1, 1),
            );
            assert!(collect(s, &mut cx).is_empty());
        }
        assert_eq!(cx.stats().mu, 0);
    }
}
