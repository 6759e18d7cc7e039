use std::ops::Range;

use crate::error::{Error, Result};

/// A window of consecutive frames scored as one unit.
#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub frames: Range<usize>,
    pub start_time: f64,
    pub label: Option<bool>,
}

/// Frame-index windows `[k*step, k*step + event_frames)` fully inside
/// `0..frame_count`.
pub fn window_events(
    frame_count: usize,
    event_frames: usize,
    step_frames: usize,
) -> Result<Vec<Range<usize>>> {
    if event_frames == 0 || step_frames == 0 || step_frames > event_frames {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= step ({step_frames}) <= event length ({event_frames})"
        )));
    }
    Ok((0..)
        .map(|k| k * step_frames)
        .take_while(|start| start + event_frames <= frame_count)
        .map(|start| start..start + event_frames)
        .collect())
}
