//! Streaming audio anomaly detection with an adaptive Huffman tree.
//!
//! Each incoming frame is turned into a feature vector and matched by cosine
//! similarity against the modes stored in the leaves of an adaptive Huffman
//! tree. Frequent modes sit near the root, rare ones deep down, so the depth
//! of the matched mode relative to the depth of the NYT leaf is an anomaly
//! score in `(0, 1]`. Modes that drift together are merged instead of
//! evicted, so the model never forgets a scene it has seen for long enough.
//!
//! ```
//! use huffguard::{Detector, DetectorConfig};
//!
//! let mut config = DetectorConfig::default();
//! config.normalize = false;
//! let mut detector = Detector::new(config).unwrap();
//! let first = detector.process_frame(&[1.0, 0.0, 0.0]).unwrap();
//! assert!(first.was_miss);
//! assert_eq!(first.score, 1.0);
//! let again = detector.process_frame(&[1.0, 0.0, 0.0]).unwrap();
//! assert!(!again.was_miss);
//! ```
//!
//! The `book/` directory next to this crate walks through the concepts; its
//! code samples are compiled as doctests of this crate.

pub mod baselines;
pub mod codebook;
pub mod detector;
pub mod error;
pub mod eval;
pub mod features;
pub mod params;
pub mod similarity;
pub mod synth;
pub mod tree;

pub use codebook::{Codebook, CodebookEntry};
pub use detector::{score_event, Detector, DetectorConfig, EventScore, FrameOutcome};
pub use error::{Error, Result};
pub use params::UpdateParams;
pub use similarity::cosine_similarity;
pub use tree::{HuffTree, Leaf, MatchResult, MergeReport, NodeId, NodeKind};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/tree.md")]
    mod tree {}
    #[doc = include_str!("../../../book/src/reorganize.md")]
    mod reorganize {}
    #[doc = include_str!("../../../book/src/merging.md")]
    mod merging {}
    #[doc = include_str!("../../../book/src/scoring.md")]
    mod scoring {}
    #[doc = include_str!("../../../book/src/features.md")]
    mod features {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
}
