use std::fmt;

/// Index of a query node. Nodes are numbered in pre-order, root = 0.
pub type QNodeId = usize;

/// Structural relationship carried by a query edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    /// Ancestor-descendant (`//`).
    Ad,
    /// Parent-child (`/`).
    Pc,
}

impl Axis {
    pub fn symbol(self) -> &'static str {
        match self {
            Axis::Ad => "//",
            Axis::Pc => "/",
        }
    }

    pub fn holds(self, anc: &super::NodeLabel, desc: &super::NodeLabel) -> bool {
        match self {
            Axis::Ad => super::rel_ad(anc, desc),
            Axis::Pc => super::rel_pc(anc, desc),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Ad => "AD",
            Axis::Pc => "PC",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryNode {
    /// Element tag, or `@name` for an attribute node.
    pub tag: String,
    pub is_output: bool,
    /// Edge to the parent; for the root, the edge from the virtual document root.
    pub axis: Axis,
    pub parent: Option<QNodeId>,
    pub children: Vec<QNodeId>,
}

/// A rooted, ordered twig pattern stored as a pre-order arena.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwigQuery {
    nodes: Vec<QueryNode>,
}

/// Builder-side description of a node: tag, output flag, axis, children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeSpec {
    pub tag: String,
    pub is_output: bool,
    pub axis: Axis,
    pub children: Vec<NodeSpec>,
}

impl NodeSpec {
    pub fn new(tag: impl Into<String>, is_output: bool, axis: Axis) -> Self {
        NodeSpec {
            tag: tag.into(),
            is_output,
            axis,
            children: Vec::new(),
        }
    }

    pub fn child(mut self, c: NodeSpec) -> Self {
        self.children.push(c);
        self
    }
}

impl TwigQuery {
    /// Builds a query from a nested description; ids are assigned in pre-order.
    /// Returns `None` if no node is marked as output.
    pub fn from_spec(root: NodeSpec) -> Option<Self> {
        let q = Self::pattern_from_spec(root);
        (q.output_count() > 0).then_some(q)
    }

    /// Same as [`TwigQuery::from_spec`] but accepts a pattern without output nodes.
    pub fn pattern_from_spec(root: NodeSpec) -> Self {
        fn walk(spec: NodeSpec, parent: Option<QNodeId>, nodes: &mut Vec<QueryNode>) -> QNodeId {
            let id = nodes.len();
            nodes.push(QueryNode {
                tag: spec.tag,
                is_output: spec.is_output,
                axis: spec.axis,
                parent,
                children: Vec::new(),
            });
            for c in spec.children {
                let cid = walk(c, Some(id), nodes);
                nodes[id].children.push(cid);
            }
            id
        }
        let mut nodes = Vec::new();
        walk(root, None, &mut nodes);
        TwigQuery { nodes }
    }

    pub fn to_spec(&self) -> NodeSpec {
        self.spec_of(0)
    }

    fn spec_of(&self, id: QNodeId) -> NodeSpec {
        let n = &self.nodes[id];
        NodeSpec {
            tag: n.tag.clone(),
            is_output: n.is_output,
            axis: n.axis,
            children: n.children.iter().map(|&c| self.spec_of(c)).collect(),
        }
    }

    pub fn root(&self) -> QNodeId {
        0
    }

    pub fn root_axis(&self) -> Axis {
        self.nodes[0].axis
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: QNodeId) -> &QueryNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[QueryNode] {
        &self.nodes
    }

    pub fn tag(&self, id: QNodeId) -> &str {
        &self.nodes[id].tag
    }

    pub fn axis(&self, id: QNodeId) -> Axis {
        self.nodes[id].axis
    }

    pub fn parent(&self, id: QNodeId) -> Option<QNodeId> {
        self.nodes[id].parent
    }

    pub fn children(&self, id: QNodeId) -> &[QNodeId] {
        &self.nodes[id].children
    }

    pub fn is_output(&self, id: QNodeId) -> bool {
        self.nodes[id].is_output
    }

    pub fn is_leaf(&self, id: QNodeId) -> bool {
        self.nodes[id].children.is_empty()
    }

    pub fn output_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_output).count()
    }

    /// Output nodes in pre-order: the column order of output matches.
    pub fn output_nodes(&self) -> Vec<QNodeId> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].is_output)
            .collect()
    }

    /// Copy of the pattern with the given output marking.
    pub fn with_outputs(&self, outputs: &[QNodeId]) -> TwigQuery {
        let mut q = self.clone();
        for (i, n) in q.nodes.iter_mut().enumerate() {
            n.is_output = outputs.contains(&i);
        }
        q
    }

    /// Nodes on the path from the root down to `id`, inclusive.
    pub fn path_from_root(&self, id: QNodeId) -> Vec<QNodeId> {
        let mut path = vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    pub fn edges(&self) -> impl Iterator<Item = (QNodeId, QNodeId, Axis)> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.parent.map(|p| (p, i, n.axis)))
    }

    /// Renders the query in the text grammar accepted by [`super::parse_tpq`].
    ///
    /// All children but the last go into a predicate; the last continues the path.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_from(0, &mut out);
        out
    }

    fn render_from(&self, id: QNodeId, out: &mut String) {
        let n = &self.nodes[id];
        out.push_str(n.axis.symbol());
        if n.is_output {
            out.push('$');
        }
        out.push_str(&n.tag);
        if let Some((last, preds)) = n.children.split_last() {
            if !preds.is_empty() {
                out.push('[');
                for (k, &c) in preds.iter().enumerate() {
                    if k > 0 {
                        out.push_str(" and ");
                    }
                    out.push('.');
                    self.render_from(c, out);
                }
                out.push(']');
            }
            self.render_from(*last, out);
        }
    }
}

impl fmt::Display for TwigQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
