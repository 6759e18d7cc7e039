use super::{HuffTree, Leaf};
use crate::error::Result;
use crate::similarity::cosine_unchecked;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MergeReport {
    pub merged_count: usize,
    pub rebuilt: bool,
}

impl HuffTree {
    /// Greedily merge the most similar pair of modes while their cosine
    /// similarity reaches `theta_merge`.
    ///
    /// A merged mode gets the summed weight and the element-wise average
    /// mean and goes to the end of the working list. If anything merged,
    /// the tree is rebuilt from the surviving modes plus the NYT leaf.
    /// Weights are not renormalized here.
    pub fn merge_pass(&mut self, theta_merge: f64) -> Result<MergeReport> {
        let mut modes: Vec<(f64, Vec<f64>)> = self
            .data_nodes()
            .map(|v| (v.weight, v.mean.expect("data node has a mean").to_vec()))
            .collect();
        let mut merged_count = 0;
        while let Some((i, j)) = most_similar_pair(&modes, theta_merge) {
            let (wj, mj) = modes.remove(j);
            let (wi, mi) = modes.remove(i);
            let mean = mi.iter().zip(&mj).map(|(a, b)| (a + b) / 2.0).collect();
            modes.push((wi + wj, mean));
            merged_count += 1;
        }
        if merged_count == 0 {
            return Ok(MergeReport::default());
        }
        let mut leaves: Vec<Leaf> = modes
            .into_iter()
            .map(|(weight, mean)| Leaf::Data { weight, mean })
            .collect();
        leaves.push(Leaf::Nyt);
        let dim = self.dim;
        *self = HuffTree::from_leaves(leaves)?;
        self.dim = dim;
        Ok(MergeReport {
            merged_count,
            rebuilt: true,
        })
    }
}

/// First pair `(i, j)`, `i < j`, of maximal similarity, if it reaches the
/// threshold.
fn most_similar_pair(modes: &[(f64, Vec<f64>)], threshold: f64) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..modes.len() {
        for j in i + 1..modes.len() {
            let s = cosine_unchecked(&modes[i].1, &modes[j].1);
            if best.is_none_or(|(_, _, b)| s > b) {
                best = Some((i, j, s));
            }
        }
    }
    best.filter(|&(_, _, s)| s >= threshold)
        .map(|(i, j, _)| (i, j))
}
