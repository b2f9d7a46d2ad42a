use super::query::{Axis, NodeSpec, QNodeId, TwigQuery};

/// Split of a query into its core (the minimal subtree spanning all output
/// nodes) and one constraining subquery per core node.
///
/// Every non-core node belongs to exactly one constraining subquery: the one
/// of the core node it stays connected to once core edges are removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryDecomposition {
    core_root: QNodeId,
    is_core: Vec<bool>,
    owner: Vec<QNodeId>,
}

pub fn decompose(q: &TwigQuery) -> QueryDecomposition {
    let n = q.len();
    let total = q.output_count();
    // pre-order ids: children have larger ids than parents
    let mut below = vec![0usize; n];
    for id in (0..n).rev() {
        below[id] =
            usize::from(q.is_output(id)) + q.children(id).iter().map(|&c| below[c]).sum::<usize>();
    }
    let is_core: Vec<bool> = (0..n)
        .map(|id| {
            let branches = q.children(id).iter().filter(|&&c| below[c] > 0).count();
            q.is_output(id) || branches >= 2 || (branches == 1 && total > below[id])
        })
        .collect();
    let core_root = (0..n)
        .find(|&id| is_core[id])
        .expect("a query with an output node has a core");

    let mut owner = vec![usize::MAX; n];
    for id in (0..n).filter(|&id| is_core[id]) {
        owner[id] = id;
    }
    // Non-core nodes above the core root hang off the core root; everything
    // else inherits the owner of its parent.
    for id in 0..n {
        if is_core[id] {
            continue;
        }
        owner[id] = match q.parent(id) {
            Some(p) if owner[p] != usize::MAX => owner[p],
            _ => core_root,
        };
    }
    QueryDecomposition {
        core_root,
        is_core,
        owner,
    }
}

impl QueryDecomposition {
    pub fn core_root(&self) -> QNodeId {
        self.core_root
    }

    pub fn is_core(&self, id: QNodeId) -> bool {
        self.is_core[id]
    }

    pub fn core_nodes(&self) -> Vec<QNodeId> {
        (0..self.is_core.len())
            .filter(|&i| self.is_core[i])
            .collect()
    }

    /// The core node whose constraining subquery contains `id`.
    pub fn owner(&self, id: QNodeId) -> QNodeId {
        self.owner[id]
    }

    /// Members of the constraining subquery of core node `q`, in pre-order.
    pub fn cons_members(&self, q: QNodeId) -> Vec<QNodeId> {
        (0..self.owner.len())
            .filter(|&i| self.owner[i] == q)
            .collect()
    }

    pub fn in_cons(&self, q: QNodeId, id: QNodeId) -> bool {
        self.owner[id] == q
    }

    /// Topmost node of the constraining subquery of `q`.
    pub fn cons_root(&self, q: QNodeId) -> QNodeId {
        if q == self.core_root {
            0
        } else {
            q
        }
    }

    pub fn core_children(&self, query: &TwigQuery, q: QNodeId) -> Vec<QNodeId> {
        query
            .children(q)
            .iter()
            .copied()
            .filter(|&c| self.is_core[c])
            .collect()
    }

    /// First core child of `q`, if any.
    pub fn core_child(&self, query: &TwigQuery, q: QNodeId) -> Option<QNodeId> {
        query.children(q).iter().copied().find(|&c| self.is_core[c])
    }

    /// The core as a standalone query; the root axis is the core root's own
    /// axis when the core root is the query root, AD otherwise.
    pub fn core_query(&self, query: &TwigQuery) -> TwigQuery {
        let axis = if self.core_root == 0 {
            query.root_axis()
        } else {
            Axis::Ad
        };
        TwigQuery::pattern_from_spec(
            self.subtree_spec(query, self.core_root, axis, &|id| self.is_core[id]),
        )
    }

    /// The constraining subquery of `q` as a standalone query whose only
    /// output node is `q`.
    pub fn cons_query(&self, query: &TwigQuery, q: QNodeId) -> TwigQuery {
        let root = self.cons_root(q);
        let axis = if root == 0 {
            query.root_axis()
        } else {
            Axis::Ad
        };
        let mut spec = self.subtree_spec(query, root, axis, &|id| self.owner[id] == q);
        fn mark(spec: &mut NodeSpec, depth_path: &[usize]) {
            match depth_path.split_first() {
                None => spec.is_output = true,
                Some((&k, rest)) => mark(&mut spec.children[k], rest),
            }
        }
        let mut path = Vec::new();
        let mut cur = q;
        while cur != root {
            let p = query.parent(cur).expect("q lies below its cons root");
            let k = query
                .children(p)
                .iter()
                .filter(|&&c| self.owner[c] == q)
                .position(|&c| c == cur)
                .expect("path node is a member");
            path.push(k);
            cur = p;
        }
        path.reverse();
        clear_outputs(&mut spec);
        mark(&mut spec, &path);
        TwigQuery::pattern_from_spec(spec)
    }

    fn subtree_spec(
        &self,
        query: &TwigQuery,
        id: QNodeId,
        axis: Axis,
        keep: &dyn Fn(QNodeId) -> bool,
    ) -> NodeSpec {
        let n = query.node(id);
        NodeSpec {
            tag: n.tag.clone(),
            is_output: n.is_output,
            axis,
            children: n
                .children
                .iter()
                .copied()
                .filter(|&c| keep(c))
                .map(|c| self.subtree_spec(query, c, query.axis(c), keep))
                .collect(),
        }
    }

    /// Glues the core edges and all constraining-subquery edges back together.
    pub fn reassemble(&self, query: &TwigQuery) -> TwigQuery {
        let keep_edge = |p: QNodeId, c: QNodeId| {
            (self.is_core[p] && self.is_core[c]) || self.owner[p] == self.owner[c]
        };
        fn build(
            query: &TwigQuery,
            id: QNodeId,
            keep_edge: &dyn Fn(QNodeId, QNodeId) -> bool,
        ) -> NodeSpec {
            let n = query.node(id);
            NodeSpec {
                tag: n.tag.clone(),
                is_output: n.is_output,
                axis: n.axis,
                children: n
                    .children
                    .iter()
                    .copied()
                    .filter(|&c| keep_edge(id, c))
                    .map(|c| build(query, c, keep_edge))
                    .collect(),
            }
        }
        TwigQuery::pattern_from_spec(build(query, 0, &keep_edge))
    }
}

fn clear_outputs(spec: &mut NodeSpec) {
    spec.is_output = false;
    for c in &mut spec.children {
        clear_outputs(c);
    }
}
