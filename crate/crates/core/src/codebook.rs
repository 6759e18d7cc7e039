use crate::error::{Error, Result};
use crate::tree::{HuffTree, NodeId};

#[derive(Clone, Debug, PartialEq)]
pub struct CodebookEntry {
    pub id: NodeId,
    pub mean: Vec<f64>,
    pub depth: usize,
}

/// Snapshot of the modes and their code lengths.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Codebook {
    entries: Vec<CodebookEntry>,
    nyt_depth: usize,
}

impl Codebook {
    pub fn from_tree(tree: &HuffTree) -> Self {
        let mut book = Self::default();
        book.refresh(tree);
        book
    }

    /// Re-read every mode and depth from `tree`.
    pub fn refresh(&mut self, tree: &HuffTree) {
        self.entries.clear();
        self.entries
            .extend(tree.data_nodes().map(|v| CodebookEntry {
                id: v.id,
                mean: v.mean.expect("data node has a mean").to_vec(),
                depth: v.depth,
            }));
        self.nyt_depth = tree.nyt_depth();
    }

    pub fn entries(&self) -> &[CodebookEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nyt_depth(&self) -> usize {
        self.nyt_depth
    }

    pub fn get(&self, id: NodeId) -> Option<&CodebookEntry> {
        // entries are in id order
        self.entries
            .binary_search_by_key(&id, |e| e.id)
            .ok()
            .map(|i| &self.entries[i])
    }

    /// Depth of the matched mode relative to the NYT depth, in (0, 1].
    pub fn frame_score(&self, matched: NodeId) -> Result<f64> {
        let entry = self.get(matched).ok_or(Error::UnknownNode(matched))?;
        if self.nyt_depth == 0 {
            return Err(Error::Corrupted("codebook has NYT depth 0".into()));
        }
        Ok(entry.depth as f64 / self.nyt_depth as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::UpdateParams;

    #[test]
    fn direct_ratio() {
        let book = Codebook {
            entries: vec![CodebookEntry {
                id: NodeId(6),
                mean: vec![1.0],
                depth: 3,
            }],
            nyt_depth: 5,
        };
        assert!((book.frame_score(NodeId(6)).unwrap() - 0.6).abs() < 1e-15);
        assert!(matches!(
            book.frame_score(NodeId(7)),
            Err(Error::UnknownNode(_))
        ));
    }

    #[test]
    fn singleton_tree_scores_one() {
        let mut tree = HuffTree::new();
        let p = UpdateParams::default();
        let id = tree.insert_on_miss(&[1.0, 0.0], &p).unwrap();
        tree.normalize_weights().unwrap();
        let book = tree.codebook();
        assert_eq!(book.len(), 1);
        assert_eq!(book.nyt_depth(), 1);
        assert_eq!(book.frame_score(id).unwrap(), 1.0);
    }

    #[test]
    fn fresh_node_scores_one() {
        let mut tree = HuffTree::new();
        let p = UpdateParams::default();
        for v in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
            let id = tree.insert_on_miss(&v, &p).unwrap();
            // fresh node is NYT's sibling
            assert_eq!(tree.codebook().frame_score(id).unwrap(), 1.0);
            tree.reorganize(id).unwrap();
            tree.normalize_weights().unwrap();
        }
    }

    #[test]
    fn depths_match_tree() {
        let mut tree = HuffTree::new();
        let p = UpdateParams::default();
        for i in 0..6 {
            let mut v = vec![0.0; 6];
            v[i] = 1.0;
            let id = tree.insert_on_miss(&v, &p).unwrap();
            tree.reorganize(id).unwrap();
            tree.normalize_weights().unwrap();
        }
        let book = tree.codebook();
        assert_eq!(book.len(), tree.data_count());
        for e in book.entries() {
            assert_eq!(e.depth, tree.depth(e.id).unwrap());
        }
        assert_eq!(book.nyt_depth(), tree.nyt_depth());
    }
}
