//! The four subcommands.

use std::fs;
use std::io::{BufReader, Write};
use std::path::Path;

use huffguard::baselines::{AgmmModel, FixedTreeModel};
use huffguard::eval::{auc, label_event, read_labels, roc_curve, write_labels, LabeledScore};
use huffguard::features::{
    decode_and_frame, read_feature_csv, window_events, write_feature_csv, FeatureConfig,
    FeatureExtractor, FeatureRow, NormalizerState,
};
use huffguard::{Detector, HuffTree};
use serde::{Deserialize, Serialize};

use crate::config::{Mode, RunConfig};
use crate::error::CliError;

/// One line of `frames.jsonl`.
#[derive(Debug, Serialize)]
pub struct FrameRecord {
    pub t: u64,
    pub time_s: f64,
    pub score: f64,
    pub matched_id: usize,
    pub miss: bool,
    pub nodes: usize,
    pub merged: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replaced: Option<u64>,
}

/// One line of `events.jsonl`.
#[derive(Debug, Serialize, Deserialize)]
pub struct EventRecord {
    pub event_start_s: f64,
    pub omega: f64,
}

#[derive(Debug, Serialize)]
struct AucReport {
    auc: f64,
    points: Vec<[f64; 2]>,
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Load raw feature rows from a WAV file (by extension) or a feature CSV,
/// truncated to the configured fraction of the stream.
pub fn load_rows(input: &Path, cfg: &RunConfig) -> Result<Vec<FeatureRow>, CliError> {
    let is_wav = input
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("wav"));
    let bytes = read_bytes(input)?;
    let mut rows = if is_wav {
        let frames = decode_and_frame(&bytes, cfg.frame_duration)?;
        match frames.first() {
            None => Vec::new(),
            Some(first) => {
                let fc = FeatureConfig::for_frames(first.sample_rate, cfg.frame_duration)?;
                let extractor = FeatureExtractor::new(fc)?;
                frames
                    .iter()
                    .map(|f| {
                        Ok(FeatureRow {
                            time_s: f.start_time,
                            values: extractor.extract(&f.samples)?,
                        })
                    })
                    .collect::<huffguard::Result<Vec<_>>>()?
            }
        }
    } else {
        read_feature_csv(BufReader::new(bytes.as_slice()))?
    };
    let keep = (rows.len() as f64 * cfg.limit_fraction).floor() as usize;
    rows.truncate(keep);
    Ok(rows)
}

/// Score every row with the configured model.
pub fn score_rows(rows: &[FeatureRow], cfg: &RunConfig) -> Result<Vec<FrameRecord>, CliError> {
    let mut out = Vec::with_capacity(rows.len());
    match cfg.mode {
        Mode::Proposed => {
            let mut d = Detector::new(cfg.detector())?;
            for row in rows {
                let o = d.process_frame(&row.values)?;
                out.push(FrameRecord {
                    t: o.t,
                    time_s: row.time_s,
                    score: o.score,
                    matched_id: o.matched_id.0,
                    miss: o.was_miss,
                    nodes: o.node_count,
                    merged: o.merged_count,
                    replaced: None,
                });
            }
        }
        Mode::FixedTree => {
            let mut m = FixedTreeModel::new(cfg.capacity, cfg.params())?;
            let mut norm = NormalizerState::new();
            for row in rows {
                let f = scaled(&mut norm, &row.values, cfg.normalize)?;
                let o = m.step(&f)?;
                out.push(FrameRecord {
                    t: o.t,
                    time_s: row.time_s,
                    score: o.score,
                    matched_id: o.matched_id.0,
                    miss: o.was_miss,
                    nodes: o.node_count,
                    merged: 0,
                    replaced: Some(m.replace_count()),
                });
            }
        }
        Mode::Agmm => {
            let mut m = AgmmModel::new(cfg.agmm())?;
            let mut norm = NormalizerState::new();
            for (i, row) in rows.iter().enumerate() {
                let f = scaled(&mut norm, &row.values, cfg.normalize)?;
                let o = m.step(&f)?;
                out.push(FrameRecord {
                    t: i as u64 + 1,
                    time_s: row.time_s,
                    score: o.score,
                    matched_id: o.component,
                    miss: o.replaced,
                    nodes: m.components().len(),
                    merged: 0,
                    replaced: Some(m.replace_count()),
                });
            }
        }
    }
    Ok(out)
}

fn scaled(norm: &mut NormalizerState, v: &[f64], on: bool) -> huffguard::Result<Vec<f64>> {
    if on {
        norm.normalize(v)
    } else {
        Ok(v.to_vec())
    }
}

/// Mean frame score over each event window.
pub fn score_events(frames: &[FrameRecord], cfg: &RunConfig) -> Result<Vec<EventRecord>, CliError> {
    let (event, step) = cfg.event_geometry();
    Ok(window_events(frames.len(), event, step)?
        .into_iter()
        .map(|r| {
            let window = &frames[r];
            EventRecord {
                event_start_s: window[0].time_s,
                omega: window.iter().map(|f| f.score).sum::<f64>() / window.len() as f64,
            }
        })
        .collect())
}

fn jsonl<T: Serialize>(records: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for r in records {
        serde_json::to_writer(&mut out, r).expect("records serialize");
        out.push(b'\n');
    }
    out
}

pub fn detect(input: &Path, out_dir: &Path, cfg: &RunConfig) -> Result<(), CliError> {
    let rows = load_rows(input, cfg)?;
    let frames = score_rows(&rows, cfg)?;
    let events = score_events(&frames, cfg)?;
    let mut nodes = String::from("t,node_count\n");
    for f in &frames {
        nodes.push_str(&format!("{},{}\n", f.t, f.nodes));
    }
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    write_file(&out_dir.join("frames.jsonl"), &jsonl(&frames))?;
    write_file(&out_dir.join("events.jsonl"), &jsonl(&events))?;
    write_file(&out_dir.join("nodes.csv"), nodes.as_bytes())
}

pub fn read_events(path: &Path) -> Result<Vec<EventRecord>, CliError> {
    let text = String::from_utf8(read_bytes(path)?)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| {
                CliError::Core(huffguard::Error::Parse(format!(
                    "{} line {}: {e}",
                    path.display(),
                    i + 1
                )))
            })
        })
        .collect()
}

pub fn eval(scores: &Path, labels: &Path, cfg: &RunConfig) -> Result<String, CliError> {
    let events = read_events(scores)?;
    let file = fs::File::open(labels).map_err(|e| CliError::io(labels, e))?;
    let intervals = read_labels(BufReader::new(file))?;
    let labeled: Vec<LabeledScore> = events
        .iter()
        .map(|e| LabeledScore {
            omega: e.omega,
            positive: label_event(e.event_start_s, cfg.event_duration, &intervals),
        })
        .collect();
    let curve = roc_curve(&labeled)?;
    let report = AucReport {
        auc: auc(&curve),
        points: curve.points.iter().map(|&(x, y)| [x, y]).collect(),
    };
    Ok(serde_json::to_string(&report).expect("report serializes") + "\n")
}

pub fn synth(features: &Path, labels: &Path, cfg: &RunConfig) -> Result<(), CliError> {
    let stream = cfg.synthetic().generate()?;
    let mut f = Vec::new();
    write_feature_csv(&mut f, &stream.rows)?;
    let mut l = Vec::new();
    write_labels(&mut l, &stream.intervals)?;
    write_file(features, &f)?;
    write_file(labels, &l)
}

/// Snapshot of the adaptive tree after the whole input has been absorbed.
pub fn dump_tree(input: &Path, cfg: &RunConfig) -> Result<String, CliError> {
    let rows = load_rows(input, cfg)?;
    if rows.is_empty() {
        return Ok(HuffTree::new().snapshot());
    }
    let mut d = Detector::new(cfg.detector())?;
    for row in &rows {
        d.process_frame(&row.values)?;
    }
    Ok(d.tree().snapshot())
}

/// Write to a file, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, text.as_bytes()),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}
