//! Per-frame pipeline around the adaptive tree, and event aggregation.

use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::features::NormalizerState;
use crate::params::UpdateParams;
use crate::tree::{HuffTree, NodeId};

#[derive(Clone, Debug, PartialEq)]
pub struct DetectorConfig {
    pub params: UpdateParams,
    /// Merge near-duplicate modes after every frame.
    pub merge: bool,
    /// Z-scale incoming vectors with running statistics before matching.
    pub normalize: bool,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            params: UpdateParams::default(),
            merge: true,
            normalize: true,
        }
    }
}

/// What happened to one frame.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameOutcome {
    /// 1-based frame counter.
    pub t: u64,
    pub matched_id: NodeId,
    /// Depth of the matched mode over the NYT depth, taken right after the
    /// hit or miss and before any merging or reordering.
    pub score: f64,
    pub was_miss: bool,
    pub merged_count: usize,
    /// Node count once the frame has been fully absorbed.
    pub node_count: usize,
}

/// Mean frame score over one event window.
#[derive(Clone, Debug, PartialEq)]
pub struct EventScore {
    pub first_t: u64,
    pub frames: usize,
    pub omega: f64,
}

/// Average the frame scores of one event.
pub fn score_event(outcomes: &[FrameOutcome]) -> Result<EventScore> {
    let first = outcomes
        .first()
        .ok_or(Error::Empty("event has no frames"))?;
    let omega = outcomes.iter().map(|o| o.score).sum::<f64>() / outcomes.len() as f64;
    Ok(EventScore {
        first_t: first.t,
        frames: outcomes.len(),
        omega,
    })
}

/// Streaming detector: one instance per audio stream.
#[derive(Clone, Debug)]
pub struct Detector {
    config: DetectorConfig,
    tree: HuffTree,
    codebook: Codebook,
    normalizer: NormalizerState,
    t: u64,
}

impl Detector {
    pub fn new(config: DetectorConfig) -> Result<Self> {
        config.params.validate()?;
        let tree = HuffTree::new();
        let codebook = tree.codebook();
        Ok(Self {
            config,
            tree,
            codebook,
            normalizer: NormalizerState::new(),
            t: 0,
        })
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    pub fn tree(&self) -> &HuffTree {
        &self.tree
    }

    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    pub fn normalizer(&self) -> &NormalizerState {
        &self.normalizer
    }

    pub fn frames_processed(&self) -> u64 {
        self.t
    }

    /// Absorb one raw feature vector and score it.
    ///
    /// Steps: optional z-scaling, best-match search, hit update or NYT
    /// split, scoring, optional merge (with a static rebuild), otherwise
    /// reordering from the touched node, weight normalization and a
    /// codebook refresh. The tree is validated before returning, so a
    /// broken invariant surfaces as [`Error::Corrupted`].
    pub fn process_frame(&mut self, raw: &[f64]) -> Result<FrameOutcome> {
        if let Some(dim) = self.tree.dim() {
            if raw.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: raw.len(),
                });
            }
        }
        let f = if self.config.normalize {
            self.normalizer.normalize(raw)?
        } else {
            raw.to_vec()
        };
        let params = &self.config.params;
        let found = self.tree.search(&f, params.theta_cos)?;
        let (touched, was_miss) = match found.best {
            Some(id) if found.matched => {
                self.tree.update_on_hit(id, &f, found.similarity, params)?;
                (id, false)
            }
            _ => (self.tree.insert_on_miss(&f, params)?, true),
        };
        let score = self.tree.score(touched)?;

        let mut merged_count = 0;
        let mut rebuilt = false;
        if self.config.merge {
            let report = self.tree.merge_pass(params.theta_merge)?;
            merged_count = report.merged_count;
            rebuilt = report.rebuilt;
        }
        if !rebuilt {
            self.tree.reorganize(touched)?;
        }
        self.tree.normalize_weights()?;
        self.codebook.refresh(&self.tree);
        self.tree.validate()?;
        self.t += 1;
        Ok(FrameOutcome {
            t: self.t,
            matched_id: touched,
            score,
            was_miss,
            merged_count,
            node_count: self.tree.node_count(),
        })
    }
}
