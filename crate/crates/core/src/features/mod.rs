//! Audio front end: framing, per-frame features, online z-scaling and event
//! windows.

mod csv;
mod mfcc;
mod normalize;
pub mod wav;
mod window;

pub use self::csv::{read_feature_csv, write_feature_csv, FeatureRow};
pub use mfcc::{FeatureConfig, FeatureExtractor, ENERGY_FLOOR, MEL_FLOOR};
pub use normalize::{NormalizerState, STD_FLOOR};
pub use wav::{decode_and_frame, AudioFrame};
pub use window::{window_events, Event};

/// Default feature dimension: 13 cepstral coefficients, log energy, ZCR.
pub const FEATURE_DIM: usize = 15;
