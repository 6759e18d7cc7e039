//! Adaptive Huffman tree over feature-space modes.
//!
//! Leaves are either *data nodes*, each holding a mode (mean vector and a
//! fractional weight), or the single zero-weight NYT leaf that is split
//! whenever a frame matches no existing mode. Every node carries an id: the
//! root is 1 and ids grow top-down, right-to-left. The tree keeps the
//! sibling property, i.e. listing nodes by ascending id gives
//! non-increasing weights, which makes it an optimal prefix tree for the
//! current weights. A mode's depth is therefore its code length, and the
//! ratio of that depth to the NYT depth is the frame's anomaly score.

mod merge;
mod rebuild;
mod reorganize;

use std::collections::VecDeque;
use std::fmt;

use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::params::UpdateParams;
use crate::similarity::cosine_unchecked;

pub use merge::MergeReport;
pub use rebuild::Leaf;
pub use reorganize::Reorganization;

/// Absolute tolerance for every weight comparison.
pub const WEIGHT_EPS: f64 = 1e-9;

/// Position of a node in the tree; 1 is the root.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Root,
    Internal,
    Data,
    Nyt,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Root => "root",
            NodeKind::Internal => "internal",
            NodeKind::Data => "data",
            NodeKind::Nyt => "nyt",
        }
    }
}

/// Read-only view of one node.
#[derive(Clone, Debug)]
pub struct NodeView<'a> {
    pub id: NodeId,
    pub kind: NodeKind,
    pub weight: f64,
    pub depth: usize,
    pub parent: Option<NodeId>,
    /// `(right, left)`; the right child always has the smaller id.
    pub children: Option<(NodeId, NodeId)>,
    pub mean: Option<&'a [f64]>,
}

/// Outcome of searching the tree for the mode closest to a frame.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchResult {
    pub matched: bool,
    pub best: Option<NodeId>,
    /// Similarity of the best candidate, `-inf` when there is none.
    pub similarity: f64,
}

#[derive(Clone, Debug)]
struct Node {
    weight: f64,
    mean: Option<Vec<f64>>,
    depth: usize,
    id: usize,
    parent: Option<usize>,
    children: Option<(usize, usize)>,
}

impl Node {
    fn leaf(weight: f64, mean: Option<Vec<f64>>) -> Self {
        Self {
            weight,
            mean,
            depth: 0,
            id: 0,
            parent: None,
            children: None,
        }
    }
}

/// The adaptive tree. Nodes live in an arena and are addressed internally
/// by handle; public methods speak [`NodeId`]s, which are recomputed after
/// every structural change.
#[derive(Clone, Debug)]
pub struct HuffTree {
    nodes: Vec<Node>,
    /// `order[id - 1]` is the handle of the node with that id.
    order: Vec<usize>,
    root: usize,
    nyt: usize,
    dim: Option<usize>,
}

impl Default for HuffTree {
    fn default() -> Self {
        Self::new()
    }
}

impl HuffTree {
    /// A fresh tree: a lone root that is also the NYT leaf.
    pub fn new() -> Self {
        let mut tree = Self {
            nodes: vec![Node::leaf(0.0, None)],
            order: Vec::new(),
            root: 0,
            nyt: 0,
            dim: None,
        };
        tree.renumber();
        tree
    }

    /// Feature dimension, fixed by the first inserted mode.
    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn data_count(&self) -> usize {
        (self.nodes.len() - 1) / 2
    }

    pub fn nyt_id(&self) -> NodeId {
        NodeId(self.nodes[self.nyt].id)
    }

    pub fn nyt_depth(&self) -> usize {
        self.nodes[self.nyt].depth
    }

    pub fn root_weight(&self) -> f64 {
        self.nodes[self.root].weight
    }

    pub fn node(&self, id: NodeId) -> Option<NodeView<'_>> {
        self.handle(id).ok().map(|h| self.view(h))
    }

    /// All nodes in ascending id order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeView<'_>> + '_ {
        self.order.iter().map(move |&h| self.view(h))
    }

    /// Data nodes in ascending id order.
    pub fn data_nodes(&self) -> impl Iterator<Item = NodeView<'_>> + '_ {
        self.nodes().filter(|v| v.kind == NodeKind::Data)
    }

    pub fn depth(&self, id: NodeId) -> Result<usize> {
        Ok(self.nodes[self.handle(id)?].depth)
    }

    pub fn weight(&self, id: NodeId) -> Result<f64> {
        Ok(self.nodes[self.handle(id)?].weight)
    }

    /// Sum over data nodes of weight times depth.
    pub fn weighted_path_length(&self) -> f64 {
        self.data_nodes().map(|v| v.weight * v.depth as f64).sum()
    }

    /// Relative code length of a data node: its depth over the NYT depth.
    pub fn score(&self, id: NodeId) -> Result<f64> {
        let h = self.data_handle(id)?;
        let nyt_depth = self.nodes[self.nyt].depth;
        if nyt_depth == 0 {
            return Err(Error::Corrupted("NYT at depth 0 with data present".into()));
        }
        Ok(self.nodes[h].depth as f64 / nyt_depth as f64)
    }

    pub fn codebook(&self) -> Codebook {
        Codebook::from_tree(self)
    }

    /// Best-matching data node by cosine similarity.
    ///
    /// Ties go to the smallest id. `matched` is set when the best similarity
    /// reaches `theta_cos`.
    pub fn search(&self, f: &[f64], theta_cos: f64) -> Result<MatchResult> {
        self.check_dim(f)?;
        let mut best: Option<(usize, f64)> = None;
        for &h in &self.order {
            let Some(mean) = &self.nodes[h].mean else {
                continue;
            };
            let s = cosine_unchecked(mean, f);
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((h, s));
            }
        }
        Ok(match best {
            Some((h, s)) => MatchResult {
                matched: s >= theta_cos,
                best: Some(NodeId(self.nodes[h].id)),
                similarity: s,
            },
            None => MatchResult {
                matched: false,
                best: None,
                similarity: f64::NEG_INFINITY,
            },
        })
    }

    /// Apply a hit: bump the node's weight and pull its mean towards `f`.
    ///
    /// Ancestor weights are refreshed; ordering is left to
    /// [`reorganize`](Self::reorganize).
    pub fn update_on_hit(
        &mut self,
        id: NodeId,
        f: &[f64],
        similarity: f64,
        params: &UpdateParams,
    ) -> Result<()> {
        self.check_dim(f)?;
        let h = self.data_handle(id)?;
        let gamma = params.gamma(similarity);
        let node = &mut self.nodes[h];
        node.weight = params.hit_weight(node.weight);
        if let Some(mean) = node.mean.as_mut() {
            for (m, x) in mean.iter_mut().zip(f) {
                *m = (1.0 - gamma) * *m + gamma * x;
            }
        }
        self.propagate(h);
        Ok(())
    }

    /// Split the NYT leaf for a frame that matched nothing.
    ///
    /// The right child becomes a data node holding `f` with weight `w_o`,
    /// the left child the new NYT. Returns the new data node's id, which is
    /// the old NYT id plus one.
    pub fn insert_on_miss(&mut self, f: &[f64], params: &UpdateParams) -> Result<NodeId> {
        self.check_dim(f)?;
        if self.dim.is_none() {
            self.dim = Some(f.len());
        }
        let old = self.nyt;
        let data = self.nodes.len();
        let nyt = data + 1;
        let mut right = Node::leaf(params.w_o, Some(f.to_vec()));
        right.parent = Some(old);
        let mut left = Node::leaf(0.0, None);
        left.parent = Some(old);
        self.nodes.push(right);
        self.nodes.push(left);
        self.nodes[old].children = Some((data, nyt));
        self.nodes[old].weight = params.w_o;
        self.nyt = nyt;
        self.renumber();
        self.propagate(old);
        Ok(NodeId(self.nodes[data].id))
    }

    /// Divide every data weight by their total and re-sum the internal
    /// nodes, leaving the root at weight 1.
    pub fn normalize_weights(&mut self) -> Result<()> {
        let total: f64 = self
            .nodes
            .iter()
            .filter(|n| n.mean.is_some())
            .map(|n| n.weight)
            .sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Corrupted(format!(
                "cannot normalize data weights summing to {total}"
            )));
        }
        for node in self.nodes.iter_mut().filter(|n| n.mean.is_some()) {
            node.weight /= total;
        }
        self.resum_all();
        Ok(())
    }

    /// Overwrite a data node in place (used by capacity-bounded baselines).
    pub fn reset_data_node(&mut self, id: NodeId, mean: &[f64], weight: f64) -> Result<()> {
        self.check_dim(mean)?;
        let h = self.data_handle(id)?;
        self.nodes[h].weight = weight;
        self.nodes[h].mean = Some(mean.to_vec());
        self.propagate(h);
        Ok(())
    }

    /// Check every structural invariant; used as a cheap self-test after
    /// each processed frame.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Corrupted(msg));
        let n = self.nodes.len();
        if n.is_multiple_of(2) || self.order.len() != n {
            return fail(format!("{n} nodes, {} numbered", self.order.len()));
        }
        if self.nodes[self.nyt].weight != 0.0 || self.nodes[self.nyt].children.is_some() {
            return fail("NYT is not a zero-weight leaf".into());
        }
        let mut max_leaf_depth = 0;
        for (pos, &h) in self.order.iter().enumerate() {
            let node = &self.nodes[h];
            if node.id != pos + 1 {
                return fail(format!("node at position {} has id {}", pos + 1, node.id));
            }
            if node.weight.is_nan() || node.weight < 0.0 {
                return fail(format!("node {} has weight {}", node.id, node.weight));
            }
            match node.children {
                Some((r, l)) => {
                    if node.mean.is_some() {
                        return fail(format!("internal node {} carries a mean", node.id));
                    }
                    for c in [r, l] {
                        if self.nodes[c].parent != Some(h) || self.nodes[c].depth != node.depth + 1
                        {
                            return fail(format!("bad link below node {}", node.id));
                        }
                    }
                    let sum = self.nodes[r].weight + self.nodes[l].weight;
                    if (node.weight - sum).abs() > WEIGHT_EPS {
                        return fail(format!(
                            "node {} weight {} != children sum {sum}",
                            node.id, node.weight
                        ));
                    }
                }
                None => {
                    if node.mean.is_none() && h != self.nyt {
                        return fail(format!("leaf {} is neither data nor NYT", node.id));
                    }
                    max_leaf_depth = max_leaf_depth.max(node.depth);
                }
            }
            if pos > 0 {
                let prev = self.nodes[self.order[pos - 1]].weight;
                if node.weight > prev + WEIGHT_EPS {
                    return fail(format!(
                        "sibling property: node {} ({}) heavier than node {} ({prev})",
                        node.id,
                        node.weight,
                        node.id - 1
                    ));
                }
            }
        }
        if self.nodes[self.nyt].depth != max_leaf_depth {
            return fail("NYT is not the deepest leaf".into());
        }
        Ok(())
    }

    /// Line-oriented dump: `id kind weight depth parent_id`, ids ascending,
    /// weights with 12 significant digits, parent 0 for the root.
    pub fn snapshot(&self) -> String {
        let mut out = String::new();
        for v in self.nodes() {
            let parent = v.parent.map_or(0, |p| p.0);
            out.push_str(&format!(
                "{} {} {} {} {}\n",
                v.id,
                v.kind.as_str(),
                format_sig(v.weight, 12),
                v.depth,
                parent
            ));
        }
        out
    }

    // -- internals --------------------------------------------------------

    fn view(&self, h: usize) -> NodeView<'_> {
        let node = &self.nodes[h];
        let kind = if h == self.nyt {
            NodeKind::Nyt
        } else if node.mean.is_some() {
            NodeKind::Data
        } else if h == self.root {
            NodeKind::Root
        } else {
            NodeKind::Internal
        };
        NodeView {
            id: NodeId(node.id),
            kind,
            weight: node.weight,
            depth: node.depth,
            parent: node.parent.map(|p| NodeId(self.nodes[p].id)),
            children: node
                .children
                .map(|(r, l)| (NodeId(self.nodes[r].id), NodeId(self.nodes[l].id))),
            mean: node.mean.as_deref(),
        }
    }

    fn handle(&self, id: NodeId) -> Result<usize> {
        if id.0 == 0 || id.0 > self.order.len() {
            return Err(Error::UnknownNode(id));
        }
        Ok(self.order[id.0 - 1])
    }

    fn data_handle(&self, id: NodeId) -> Result<usize> {
        let h = self.handle(id)?;
        if self.nodes[h].mean.is_none() {
            return Err(Error::NotDataNode(id));
        }
        Ok(h)
    }

    fn check_dim(&self, f: &[f64]) -> Result<()> {
        match self.dim {
            Some(d) if d != f.len() => Err(Error::DimensionMismatch {
                expected: d,
                got: f.len(),
            }),
            _ => Ok(()),
        }
    }

    /// Reassign ids breadth-first (right child before left) and depths.
    fn renumber(&mut self) {
        self.order.clear();
        self.nodes[self.root].depth = 0;
        let mut queue = VecDeque::from([self.root]);
        while let Some(h) = queue.pop_front() {
            self.order.push(h);
            self.nodes[h].id = self.order.len();
            if let Some((r, l)) = self.nodes[h].children {
                let d = self.nodes[h].depth + 1;
                self.nodes[r].depth = d;
                self.nodes[l].depth = d;
                queue.push_back(r);
                queue.push_back(l);
            }
        }
    }

    /// Recompute the weights of every ancestor of `h`.
    fn propagate(&mut self, h: usize) {
        let mut cur = if self.nodes[h].children.is_some() {
            Some(h)
        } else {
            self.nodes[h].parent
        };
        while let Some(p) = cur {
            if let Some((r, l)) = self.nodes[p].children {
                self.nodes[p].weight = self.nodes[r].weight + self.nodes[l].weight;
            }
            cur = self.nodes[p].parent;
        }
    }

    /// Postorder re-sum of all internal weights.
    fn resum_all(&mut self) {
        for i in (0..self.order.len()).rev() {
            let h = self.order[i];
            if let Some((r, l)) = self.nodes[h].children {
                self.nodes[h].weight = self.nodes[r].weight + self.nodes[l].weight;
            }
        }
    }
}

/// `%.{digits}g`-style formatting, bit-compatible with C's printf.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
