use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// Containment label `[left:right, level]` of one data node.
///
/// `left` and `right` are the positions of the open and close events in
/// document order, so ancestry is interval containment. Labels order by
/// `left`, which is document order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeLabel {
    pub left: u32,
    pub right: u32,
    pub level: u32,
}

impl NodeLabel {
    pub const fn new(left: u32, right: u32, level: u32) -> Self {
        NodeLabel { left, right, level }
    }

    /// True iff `self` is a proper ancestor of `other`.
    #[inline]
    pub fn contains(&self, other: &NodeLabel) -> bool {
        rel_ad(self, other)
    }

    #[inline]
    pub fn is_parent_of(&self, other: &NodeLabel) -> bool {
        rel_pc(self, other)
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{},{}]", self.left, self.right, self.level)
    }
}

/// Ancestor-descendant test: `d`'s interval lies strictly inside `a`'s.
#[inline]
pub fn rel_ad(a: &NodeLabel, d: &NodeLabel) -> bool {
    a.left < d.left && d.right < a.right
}

/// Parent-child test: ancestor-descendant with adjacent levels.
#[inline]
pub fn rel_pc(p: &NodeLabel, c: &NodeLabel) -> bool {
    rel_ad(p, c) && p.level + 1 == c.level
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot compare tuples of arity {left} and {right}")]
pub struct ArityMismatch {
    pub left: usize,
    pub right: usize,
}

/// Lexicographic comparison of label tuples by document order, column by column.
pub fn lex_compare(t1: &[NodeLabel], t2: &[NodeLabel]) -> Result<Ordering, ArityMismatch> {
    if t1.len() != t2.len() {
        return Err(ArityMismatch {
            left: t1.len(),
            right: t2.len(),
        });
    }
    Ok(t1
        .iter()
        .zip(t2)
        .map(|(a, b)| a.left.cmp(&b.left))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal))
}

#[cfg(test)]
mod tests {
    use super::*;

    const fn l(left: u32, right: u32, level: u32) -> NodeLabel {
        NodeLabel::new(left, right, level)
    }

    #[test]
    fn ancestor_descendant() {
        assert!(rel_ad(&l(2, 19, 2), &l(4, 7, 4)));
        assert!(!rel_ad(&l(4, 7, 4), &l(2, 19, 2)));
        assert!(!rel_ad(&l(3, 8, 3), &l(9, 18, 3)));
    }

    #[test]
    fn parent_child() {
        assert!(rel_pc(&l(1, 32, 1), &l(2, 19, 2)));
        assert!(!rel_pc(&l(2, 19, 2), &l(4, 7, 4)));
        assert!(!rel_pc(&l(5, 6, 5), &l(5, 6, 5)));
    }

    #[test]
    fn lexicographic_order() {
        let a = [l(2, 19, 2), l(4, 7, 4)];
        let b = [l(2, 19, 2), l(5, 6, 5)];
        assert_eq!(lex_compare(&a, &b), Ok(Ordering::Less));
        assert_eq!(lex_compare(&a, &a), Ok(Ordering::Equal));
        let c = [l(20, 31, 2), l(23, 24, 5)];
        assert_eq!(lex_compare(&c, &b), Ok(Ordering::Greater));
        assert_eq!(
            lex_compare(&a, &a[..1]),
            Err(ArityMismatch { left: 2, right: 1 })
        );
    }

    #[test]
    fn display() {
        assert_eq!(l(4, 7, 4).to_string(), "[4:7,4]");
    }
}
