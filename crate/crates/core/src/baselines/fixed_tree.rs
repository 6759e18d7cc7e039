use crate::codebook::Codebook;
use crate::detector::FrameOutcome;
use crate::error::{Error, Result};
use crate::params::UpdateParams;
use crate::tree::{HuffTree, NodeId};

/// Adaptive Huffman tree holding at most `capacity` modes.
///
/// Once full, a frame that matches nothing overwrites the lightest mode in
/// place instead of splitting the NYT leaf. Modes are never merged.
#[derive(Clone, Debug)]
pub struct FixedTreeModel {
    capacity: usize,
    params: UpdateParams,
    tree: HuffTree,
    codebook: Codebook,
    replace_count: u64,
    t: u64,
}

impl FixedTreeModel {
    pub fn new(capacity: usize, params: UpdateParams) -> Result<Self> {
        if capacity < 2 {
            return Err(Error::InvalidParameter(format!(
                "fixed tree capacity must be at least 2, got {capacity}"
            )));
        }
        params.validate()?;
        let tree = HuffTree::new();
        let codebook = tree.codebook();
        Ok(Self {
            capacity,
            params,
            tree,
            codebook,
            replace_count: 0,
            t: 0,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn tree(&self) -> &HuffTree {
        &self.tree
    }

    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    /// Modes overwritten so far.
    pub fn replace_count(&self) -> u64 {
        self.replace_count
    }

    /// Absorb one (already scaled) feature vector.
    pub fn step(&mut self, f: &[f64]) -> Result<FrameOutcome> {
        let params = &self.params;
        let found = self.tree.search(f, params.theta_cos)?;
        let (touched, was_miss) = match found.best {
            Some(id) if found.matched => {
                self.tree.update_on_hit(id, f, found.similarity, params)?;
                (id, false)
            }
            _ if self.tree.data_count() < self.capacity => {
                (self.tree.insert_on_miss(f, params)?, true)
            }
            _ => {
                let victim = self.lightest_mode();
                self.tree.reset_data_node(victim, f, params.w_o)?;
                self.replace_count += 1;
                (victim, true)
            }
        };
        let score = self.tree.score(touched)?;
        self.tree.reorganize(touched)?;
        self.tree.normalize_weights()?;
        self.codebook.refresh(&self.tree);
        self.tree.validate()?;
        self.t += 1;
        Ok(FrameOutcome {
            t: self.t,
            matched_id: touched,
            score,
            was_miss,
            merged_count: 0,
            node_count: self.tree.node_count(),
        })
    }

    /// Lightest data node; ties go to the largest id, the one nearest the
    /// bottom of the tree.
    fn lightest_mode(&self) -> NodeId {
        self.tree
            .data_nodes()
            .fold(None::<(NodeId, f64)>, |best, v| match best {
                Some((_, w)) if w < v.weight => best,
                _ => Some((v.id, v.weight)),
            })
            .map(|(id, _)| id)
            .expect("a full tree has modes")
    }
}
