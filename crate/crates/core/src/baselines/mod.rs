//! Reference competitors: a Huffman tree with a hard mode budget, and an
//! adaptive Gaussian mixture with rank-based scores.

mod agmm;
mod fixed_tree;

pub use agmm::{AgmmConfig, AgmmModel, AgmmOutcome, Component};
pub use fixed_tree::FixedTreeModel;
