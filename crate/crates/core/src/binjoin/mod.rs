//! Pull-based binary structural joins.
//!
//! Every operator consumes inputs sorted by its join column(s) and emits a
//! sorted stream, so operators compose without sorting or materialization.
//! Partial-joins emit projected tuple pairs; semi-joins emit single labels of
//! one side.

mod partial;
mod semi;

use std::fmt;

use crate::exec::ExecContext;
use crate::model::{Axis, NodeLabel, Tuple};

pub use partial::{StackTreeAnc, StackTreeDesc};
pub use semi::{SemiJoinAncAd, SemiJoinAncPc, SemiJoinDescAd, SemiJoinDescPc};

pub trait TupleStream {
    fn next(&mut self, cx: &mut ExecContext) -> Option<Tuple>;
}

pub type BoxStream<'a> = Box<dyn TupleStream + 'a>;

impl<S: TupleStream + ?Sized> TupleStream for Box<S> {
    fn next(&mut self, cx: &mut ExecContext) -> Option<Tuple> {
        (**self).next(cx)
    }
}

/// An operator input with a one-tuple lookahead.
pub struct Input<'a> {
    src: BoxStream<'a>,
    head: Option<Tuple>,
    primed: bool,
}

impl<'a> Input<'a> {
    pub fn new(src: BoxStream<'a>) -> Self {
        Input {
            src,
            head: None,
            primed: false,
        }
    }

    fn prime(&mut self, cx: &mut ExecContext) {
        if !self.primed {
            self.primed = true;
            self.advance(cx);
        }
    }

    pub fn head(&mut self, cx: &mut ExecContext) -> Option<&Tuple> {
        self.prime(cx);
        self.head.as_ref()
    }

    /// Label in column `col` of the head tuple.
    pub fn key(&mut self, cx: &mut ExecContext, col: usize) -> Option<NodeLabel> {
        self.head(cx).map(|t| t[col])
    }

    pub fn advance(&mut self, cx: &mut ExecContext) {
        cx.advance();
        self.head = self.src.next(cx);
    }

    /// Returns the head and moves to the next tuple.
    pub fn take(&mut self, cx: &mut ExecContext) -> Option<Tuple> {
        self.prime(cx);
        let t = self.head.take();
        if t.is_some() {
            self.advance(cx);
        }
        t
    }

    pub fn finished(&mut self, cx: &mut ExecContext) -> bool {
        self.head(cx).is_none()
    }
}

/// Column projection mask; `true` keeps the column.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mask(pub Vec<bool>);

impl Mask {
    /// `1*`: keep all `arity` columns.
    pub fn all(arity: usize) -> Self {
        Mask(vec![true; arity])
    }

    /// `01*`: drop the first column, keep the rest.
    pub fn drop_first(arity: usize) -> Self {
        Mask((0..arity).map(|c| c > 0).collect())
    }

    /// `10*`: keep only the first column.
    pub fn first_only(arity: usize) -> Self {
        Mask((0..arity).map(|c| c == 0).collect())
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn kept(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    fn apply_into(&self, t: &[NodeLabel], out: &mut Tuple) {
        out.extend(t.iter().zip(&self.0).filter(|(_, &k)| k).map(|(l, _)| *l));
    }
}

impl fmt::Display for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Parameters of a partial-join. Column indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JoinSpec {
    pub ma: Mask,
    pub md: Mask,
    /// Join column in the ancestor input.
    pub i: usize,
    /// Primary join column in the descendant input.
    pub j: usize,
    /// Secondary column in the descendant input, for the sorted variant only.
    pub k: Option<usize>,
    pub alpha: Axis,
}

impl JoinSpec {
    pub fn new(ma: Mask, md: Mask, i: usize, j: usize, alpha: Axis) -> Self {
        JoinSpec {
            ma,
            md,
            i,
            j,
            k: None,
            alpha,
        }
    }

    pub fn with_secondary(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn out_arity(&self) -> usize {
        self.ma.kept() + self.md.kept()
    }

    pub(crate) fn project(&self, a: &[NodeLabel], d: &[NodeLabel]) -> Tuple {
        let mut out = Vec::with_capacity(self.out_arity());
        self.ma.apply_into(a, &mut out);
        self.md.apply_into(d, &mut out);
        out
    }
}

/// Streams one tag list as single-column tuples.
pub struct IndexScan<'a> {
    labels: &'a [NodeLabel],
    pos: usize,
}

impl<'a> IndexScan<'a> {
    pub fn new(labels: &'a [NodeLabel]) -> Self {
        IndexScan { labels, pos: 0 }
    }
}

impl TupleStream for IndexScan<'_> {
    fn next(&mut self, _cx: &mut ExecContext) -> Option<Tuple> {
        let l = *self.labels.get(self.pos)?;
        self.pos += 1;
        Some(vec![l])
    }
}

/// Streams a fixed, already sorted table.
pub struct VecStream {
    rows: std::vec::IntoIter<Tuple>,
}

impl VecStream {
    pub fn new(rows: Vec<Tuple>) -> Self {
        VecStream {
            rows: rows.into_iter(),
        }
    }
}

impl TupleStream for VecStream {
    fn next(&mut self, _cx: &mut ExecContext) -> Option<Tuple> {
        self.rows.next()
    }
}

/// Drains a stream into a vector.
pub fn collect(mut s: impl TupleStream, cx: &mut ExecContext) -> Vec<Tuple> {
    let mut out = Vec::new();
    while let Some(t) = s.next(cx) {
        out.push(t);
    }
    out
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use crate::ingest::{parse_and_label, InvertedIndex};

    pub const FIG1A: &str = "<r><a><b><c><c/></c></b><d><d><e/></d><e><f/></e></d></a>\
                             <a><b><b><c/></b></b><d><e/></d></a></r>";

    pub fn fig1a() -> InvertedIndex {
        parse_and_label(FIG1A.as_bytes()).unwrap()
    }

    pub fn scan<'a>(idx: &'a InvertedIndex, tag: &str) -> BoxStream<'a> {
        Box::new(IndexScan::new(idx.list(tag)))
    }

    pub fn rows(t: &[Tuple]) -> Vec<Vec<(u32, u32)>> {
        t.iter()
            .map(|r| r.iter().map(|l| (l.left, l.right)).collect())
            .collect()
    }
}
