//! Ground-truth labels, ROC curves and AUC.

use std::io::BufRead;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabeledScore {
    pub omega: f64,
    /// `true` for an anomaly.
    pub positive: bool,
}

/// `(fpr, tpr)` points from `(0, 0)` to `(1, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RocCurve {
    pub points: Vec<(f64, f64)>,
}

/// Sweep the threshold down through the distinct scores.
///
/// Scores are visited in descending order and a point is emitted only once a
/// whole group of tied scores has been consumed, so ties become diagonal
/// segments.
pub fn roc_curve(scores: &[LabeledScore]) -> Result<RocCurve> {
    let pos = scores.iter().filter(|s| s.positive).count();
    let neg = scores.len() - pos;
    if pos == 0 {
        return Err(Error::MissingClass("anomaly"));
    }
    if neg == 0 {
        return Err(Error::MissingClass("normal"));
    }
    if let Some(bad) = scores.iter().find(|s| !s.omega.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "non-finite score {}",
            bad.omega
        )));
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| b.omega.total_cmp(&a.omega));
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut points = vec![(0.0, 0.0)];
    for (i, s) in sorted.iter().enumerate() {
        if s.positive {
            tp += 1;
        } else {
            fp += 1;
        }
        let group_done = sorted.get(i + 1).is_none_or(|next| next.omega != s.omega);
        if group_done {
            points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
        }
    }
    Ok(RocCurve { points })
}

/// Trapezoidal area under the curve.
pub fn auc(curve: &RocCurve) -> f64 {
    curve
        .points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum()
}

/// A labeled anomaly interval in seconds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub start_s: f64,
    pub end_s: f64,
}

/// Parse a `start_s,end_s,label` CSV. Only `anomaly` rows are accepted; an
/// optional header line is skipped.
pub fn read_labels<R: BufRead>(reader: R) -> Result<Vec<Interval>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with("start_s")) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [start, end, label] = fields[..] else {
            return Err(Error::Parse(format!(
                "labels line {}: expected 3 fields",
                i + 1
            )));
        };
        if label != "anomaly" {
            return Err(Error::Parse(format!(
                "labels line {}: unknown label {label}",
                i + 1
            )));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse(format!("labels line {}: bad time {s}", i + 1)))
        };
        let (start_s, end_s) = (num(start)?, num(end)?);
        if end_s < start_s {
            return Err(Error::Parse(format!(
                "labels line {}: interval ends before it starts",
                i + 1
            )));
        }
        out.push(Interval { start_s, end_s });
    }
    Ok(out)
}

pub fn write_labels<W: std::io::Write>(mut out: W, intervals: &[Interval]) -> Result<()> {
    writeln!(out, "start_s,end_s,label")?;
    for iv in intervals {
        writeln!(out, "{},{},anomaly", iv.start_s, iv.end_s)?;
    }
    Ok(())
}

/// An event is anomalous when at least half of `[start, start + duration)`
/// is covered by the union of the labeled intervals.
pub fn label_event(start_s: f64, duration_s: f64, intervals: &[Interval]) -> bool {
    let end = start_s + duration_s;
    let mut clipped: Vec<(f64, f64)> = intervals
        .iter()
        .map(|iv| (iv.start_s.max(start_s), iv.end_s.min(end)))
        .filter(|(a, b)| b > a)
        .collect();
    clipped.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut covered = 0.0;
    let mut reach = start_s;
    for (a, b) in clipped {
        let a = a.max(reach);
        if b > a {
            covered += b - a;
            reach = b;
        }
    }
    covered >= 0.5 * duration_s
}
