use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{HuffTree, Node};
use crate::error::{Error, Result};

/// Leaf handed to [`HuffTree::from_leaves`].
#[derive(Clone, Debug, PartialEq)]
pub enum Leaf {
    Data { weight: f64, mean: Vec<f64> },
    Nyt,
}

impl Leaf {
    fn weight(&self) -> f64 {
        match self {
            Leaf::Data { weight, .. } => *weight,
            Leaf::Nyt => 0.0,
        }
    }
}

struct HeapItem {
    weight: f64,
    height: usize,
    seq: usize,
    node: usize,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    // Reversed so the std max-heap pops the lightest, then shallowest,
    // then oldest subtree.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .weight
            .total_cmp(&self.weight)
            .then(other.height.cmp(&self.height))
            .then(other.seq.cmp(&self.seq))
    }
}

impl HuffTree {
    /// Build a static Huffman tree over the given leaves.
    ///
    /// Exactly one [`Leaf::Nyt`] must be present. Leaf depths come from the
    /// classic bottom-up construction (ties: lighter, then shallower, then
    /// earlier subtree first). The tree is then laid out level by level so
    /// that ids, assigned top-down and right-to-left, list weights in
    /// non-increasing order with the heavier sibling on the right.
    pub fn from_leaves(leaves: Vec<Leaf>) -> Result<Self> {
        let nyt_count = leaves.iter().filter(|l| matches!(l, Leaf::Nyt)).count();
        if nyt_count != 1 {
            return Err(Error::InvalidLeaves(format!(
                "expected exactly one NYT leaf, found {nyt_count}"
            )));
        }
        let mut dim = None;
        for leaf in &leaves {
            if let Leaf::Data { weight, mean } = leaf {
                if !(*weight >= 0.0 && weight.is_finite()) {
                    return Err(Error::InvalidLeaves(format!("data weight {weight}")));
                }
                match dim {
                    None => dim = Some(mean.len()),
                    Some(d) if d != mean.len() => {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            got: mean.len(),
                        })
                    }
                    _ => {}
                }
            }
        }

        let depths = huffman_depths(&leaves);
        let mut tree = layout(leaves, &depths);
        tree.dim = dim;
        Ok(tree)
    }
}

/// Leaf depths of a bottom-up Huffman construction.
fn huffman_depths(leaves: &[Leaf]) -> Vec<usize> {
    if leaves.len() == 1 {
        return vec![0];
    }
    // members[i] lists the leaves under heap node i.
    let mut members: Vec<Vec<usize>> = (0..leaves.len()).map(|i| vec![i]).collect();
    let mut depths = vec![0; leaves.len()];
    let mut heap: BinaryHeap<HeapItem> = leaves
        .iter()
        .enumerate()
        .map(|(i, leaf)| HeapItem {
            weight: leaf.weight(),
            height: 0,
            // The NYT leaf loses every tie so it ends up deepest even next to
            // zero-weight modes.
            seq: if matches!(leaf, Leaf::Nyt) { 0 } else { i + 1 },
            node: i,
        })
        .collect();
    let mut seq = leaves.len() + 1;
    while heap.len() > 1 {
        let a = heap.pop().expect("two items");
        let b = heap.pop().expect("two items");
        let mut joined = std::mem::take(&mut members[a.node]);
        joined.append(&mut std::mem::take(&mut members[b.node]));
        for &leaf in &joined {
            depths[leaf] += 1;
        }
        members.push(joined);
        heap.push(HeapItem {
            weight: a.weight + b.weight,
            height: a.height.max(b.height) + 1,
            seq,
            node: members.len() - 1,
        });
        seq += 1;
    }
    depths
}

/// Lay out a full binary tree with the given leaf depths, deepest level
/// first: each level's nodes are sorted heaviest first and adjacent pairs
/// become siblings.
fn layout(leaves: Vec<Leaf>, depths: &[usize]) -> HuffTree {
    let max_depth = depths.iter().copied().max().unwrap_or(0);
    let mut nodes: Vec<Node> = Vec::with_capacity(2 * leaves.len() - 1);
    let mut nyt = 0;
    let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); max_depth + 1];
    for (leaf, &depth) in leaves.into_iter().zip(depths) {
        let handle = nodes.len();
        match leaf {
            Leaf::Data { weight, mean } => nodes.push(Node::leaf(weight, Some(mean))),
            Leaf::Nyt => {
                nyt = handle;
                nodes.push(Node::leaf(0.0, None));
            }
        }
        by_level[depth].push(handle);
    }

    // Internal nodes built from the level below, in pairing order.
    let mut carried: Vec<usize> = Vec::new();
    for depth in (0..=max_depth).rev() {
        let mut level = std::mem::take(&mut carried);
        level.extend(by_level[depth].iter().copied());
        // Stable: equal-weight parents keep the order of their children.
        level.sort_by(|&a, &b| nodes[b].weight.total_cmp(&nodes[a].weight));
        if depth == 0 {
            debug_assert_eq!(level.len(), 1);
            break;
        }
        for pair in level.chunks(2) {
            let (r, l) = (pair[0], pair[1]);
            let parent = nodes.len();
            let mut node = Node::leaf(nodes[r].weight + nodes[l].weight, None);
            node.children = Some((r, l));
            nodes.push(node);
            nodes[r].parent = Some(parent);
            nodes[l].parent = Some(parent);
            carried.push(parent);
        }
    }
    let root = nodes.len() - 1;
    let mut tree = HuffTree {
        nodes,
        order: Vec::new(),
        root,
        nyt,
        dim: None,
    };
    tree.renumber();
    tree
}
