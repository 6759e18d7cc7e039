use super::{HuffTree, NodeId, WEIGHT_EPS};
use crate::error::{Error, Result};

/// Swaps performed by one [`HuffTree::reorganize`] call, as `(x, y)` id
/// pairs at the moment of the swap: `x` was the heavier node moving up to
/// `y`'s position.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Reorganization {
    pub swaps: Vec<(NodeId, NodeId)>,
}

impl HuffTree {
    /// Restore the sibling property after the weight of `start` (and its
    /// ancestors) changed, or after `start` was created by an NYT split.
    ///
    /// Nodes are visited from the highest id down. A visited node `x` is
    /// exchanged, together with its subtree, with the lighter lower-id node
    /// `y` maximizing `w_x - w_y`; then `x` is revisited from its new
    /// position and the successor of its old slot is queued (the parent for
    /// a right child, the sibling for a left child). The walk stops at the
    /// root's right child. Any ordering defect left over from subtrees of
    /// different shape changing level is then settled by rerunning the walk
    /// from the highest-id offender.
    pub fn reorganize(&mut self, start: NodeId) -> Result<Reorganization> {
        let start = self.handle(start)?;
        let mut report = Reorganization::default();
        let mut budget = self.swap_budget();
        self.visit_walk(start, &mut report, &mut budget)?;
        while let Some(offender) = self.highest_violation() {
            self.visit_walk(offender, &mut report, &mut budget)?;
        }
        Ok(report)
    }

    fn swap_budget(&self) -> usize {
        let n = self.nodes.len();
        4 * n * n + 64
    }

    fn visit_walk(
        &mut self,
        start: usize,
        report: &mut Reorganization,
        budget: &mut usize,
    ) -> Result<()> {
        let mut visit = vec![start];
        while let Some(&x) = visit.iter().max_by_key(|&&h| self.nodes[h].id) {
            let x_id = self.nodes[x].id;
            if x_id < 3 {
                break;
            }
            if *budget == 0 {
                return Err(Error::Corrupted("reorganization did not converge".into()));
            }
            *budget -= 1;

            let wx = self.nodes[x].weight;
            let mut lightest: Option<(usize, f64)> = None;
            for &y in &self.order[..x_id - 1] {
                let gap = wx - self.nodes[y].weight;
                if lightest.is_none_or(|(_, g)| gap > g) {
                    lightest = Some((y, gap));
                }
            }
            visit.retain(|&h| h != x);
            match lightest {
                Some((y, gap)) if gap > WEIGHT_EPS => {
                    let y_id = self.nodes[y].id;
                    self.swap_subtrees(x, y);
                    report.swaps.push((NodeId(x_id), NodeId(y_id)));
                    // x now sits in y's old slot and y in x's.
                    visit.retain(|&h| h != y);
                    push_unique(&mut visit, x);
                    if let Some(z) = self.successor(y) {
                        push_unique(&mut visit, z);
                    }
                }
                _ => {
                    if let Some(z) = self.successor(x) {
                        push_unique(&mut visit, z);
                    }
                }
            }
        }
        let root = self.root;
        self.propagate(root);
        Ok(())
    }

    /// Parent for a right child, sibling for a left child.
    fn successor(&self, h: usize) -> Option<usize> {
        let p = self.nodes[h].parent?;
        let (r, _) = self.nodes[p].children?;
        Some(if r == h { p } else { r })
    }

    /// Exchange two disjoint subtrees, then refresh ids, depths and the
    /// weights above both.
    fn swap_subtrees(&mut self, a: usize, b: usize) {
        let pa = self.nodes[a].parent.expect("swapped node has a parent");
        let pb = self.nodes[b].parent.expect("swapped node has a parent");
        if pa == pb {
            let (r, l) = self.nodes[pa].children.expect("parent has children");
            self.nodes[pa].children = Some((l, r));
        } else {
            replace_child(&mut self.nodes[pa].children, a, b);
            replace_child(&mut self.nodes[pb].children, b, a);
            self.nodes[a].parent = Some(pb);
            self.nodes[b].parent = Some(pa);
        }
        self.renumber();
        // Higher id first, then the lower one.
        let (first, second) = if self.nodes[pa].id > self.nodes[pb].id {
            (pa, pb)
        } else {
            (pb, pa)
        };
        self.propagate(first);
        self.propagate(second);
    }

    /// Highest-id node that is heavier than some lower-id node.
    pub(crate) fn highest_violation(&self) -> Option<usize> {
        let mut prefix_min = f64::INFINITY;
        let mut found = None;
        for &h in &self.order {
            let w = self.nodes[h].weight;
            if w > prefix_min + WEIGHT_EPS {
                found = Some(h);
            }
            prefix_min = prefix_min.min(w);
        }
        found
    }
}

fn replace_child(children: &mut Option<(usize, usize)>, old: usize, new: usize) {
    if let Some((r, l)) = children.as_mut() {
        if *r == old {
            *r = new;
        } else if *l == old {
            *l = new;
        }
    }
}

fn push_unique(list: &mut Vec<usize>, h: usize) {
    if !list.contains(&h) {
        list.push(h);
    }
}
