//! Seeded synthetic feature streams with planted anomalies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, WeightedIndex};

use crate::error::{Error, Result};
use crate::eval::Interval;
use crate::features::FeatureRow;
use crate::similarity::cosine_unchecked;

/// A Gaussian blob with isotropic spread.
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub mean: Vec<f64>,
    /// Per-dimension standard deviation.
    pub spread: f64,
    /// Relative frequency among background clusters.
    pub frequency: f64,
    /// When set, the mean travels straight towards this point at the drift
    /// rate and stays there; otherwise it drifts along a random direction.
    pub drift_target: Option<Vec<f64>>,
}

/// A non-anomalous scene event that takes over the stream for a while,
/// possibly several times.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurringEvent {
    pub cluster: Cluster,
    /// `(first_frame, frame_count)` per occurrence.
    pub occurrences: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub dim: usize,
    pub clusters: Vec<Cluster>,
    /// Distance each background mean moves per frame along its own fixed
    /// random direction.
    pub drift_rate: f64,
    /// Fraction of frames replaced by planted outliers.
    pub anomaly_fraction: f64,
    /// Frames per planted anomaly interval.
    pub anomaly_frames: usize,
    /// Minimum distance of an outlier center from every cluster mean, in
    /// units of the largest cluster spread.
    pub outlier_sigma: f64,
    /// Largest allowed cosine similarity between an outlier center and any
    /// cluster mean.
    pub outlier_max_cosine: f64,
    /// Per-dimension spread of frames around an outlier center.
    pub outlier_spread: f64,
    /// No anomaly is planted before this frame.
    pub warmup_frames: usize,
    pub recurring: Vec<RecurringEvent>,
    pub frames: usize,
    pub frame_duration: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    /// Five well-separated 15-dimensional clusters, 4000 frames, 2% of them
    /// in 8-frame outlier bursts.
    fn default() -> Self {
        Self {
            dim: 15,
            clusters: block_clusters(15, 5, 4.0, 0.15),
            drift_rate: 0.0,
            anomaly_fraction: 0.02,
            anomaly_frames: 8,
            outlier_sigma: 6.0,
            outlier_max_cosine: 0.5,
            outlier_spread: 0.15,
            warmup_frames: 400,
            recurring: Vec::new(),
            frames: 4000,
            frame_duration: 0.5,
            seed: 42,
        }
    }
}

/// `count` equally frequent clusters; cluster `k` has `scale` on its own
/// block of `dim / count` consecutive coordinates and zero elsewhere.
pub fn block_clusters(dim: usize, count: usize, scale: f64, spread: f64) -> Vec<Cluster> {
    let block = (dim / count.max(1)).max(1);
    (0..count)
        .map(|k| {
            let mut mean = vec![0.0; dim];
            for d in (k * block..(k + 1) * block).filter(|&d| d < dim) {
                mean[d] = scale;
            }
            Cluster {
                mean,
                spread,
                frequency: 1.0,
                drift_target: None,
            }
        })
        .collect()
}

/// Where a generated frame came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameSource {
    Background(usize),
    Recurring(usize),
    Anomaly(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticStream {
    pub rows: Vec<FeatureRow>,
    pub sources: Vec<FrameSource>,
    /// Ground-truth anomaly intervals in seconds.
    pub intervals: Vec<Interval>,
}

impl SyntheticStream {
    pub fn is_anomalous(&self, frame: usize) -> bool {
        matches!(self.sources[frame], FrameSource::Anomaly(_))
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.clusters.is_empty() {
            return Err(Error::InvalidParameter(
                "synthetic stream needs at least one cluster".into(),
            ));
        }
        if self.frames == 0 {
            return Err(Error::InvalidParameter(
                "synthetic stream needs at least one frame".into(),
            ));
        }
        if self.dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let all = self
            .clusters
            .iter()
            .chain(self.recurring.iter().map(|r| &r.cluster));
        for c in all {
            if c.mean.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got: c.mean.len(),
                });
            }
            if c.drift_target.as_ref().is_some_and(|t| t.len() != self.dim) {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got: c.drift_target.as_ref().map_or(0, Vec::len),
                });
            }
            if !(c.spread >= 0.0 && c.frequency >= 0.0) {
                return Err(Error::InvalidParameter(
                    "negative spread or frequency".into(),
                ));
            }
        }
        if !self.clusters.iter().any(|c| c.frequency > 0.0) {
            return Err(Error::InvalidParameter(
                "all cluster frequencies are zero".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.anomaly_fraction) || self.anomaly_frames == 0 {
            return Err(Error::InvalidParameter(format!(
                "anomaly fraction {} with {}-frame bursts",
                self.anomaly_fraction, self.anomaly_frames
            )));
        }
        if !(self.outlier_spread >= 0.0 && self.outlier_sigma >= 0.0) {
            return Err(Error::InvalidParameter(
                "negative outlier spread or distance".into(),
            ));
        }
        if self.frame_duration.is_nan() || self.frame_duration <= 0.0 {
            return Err(Error::InvalidParameter(
                "frame duration must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<SyntheticStream> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let std_normal = Normal::new(0.0, 1.0).expect("unit normal");

        let directions: Vec<Vec<f64>> = self
            .clusters
            .iter()
            .map(|_| unit_vector(self.dim, &mut rng, &std_normal))
            .collect();

        let mut sources: Vec<Option<FrameSource>> = vec![None; self.frames];
        for (r, ev) in self.recurring.iter().enumerate() {
            for &(start, len) in &ev.occurrences {
                for s in sources.iter_mut().skip(start).take(len) {
                    *s = Some(FrameSource::Recurring(r));
                }
            }
        }

        let starts = self.place_anomalies(&mut rng, &sources);
        let max_spread = self.clusters.iter().map(|c| c.spread).fold(0.0, f64::max);
        let mut outliers = Vec::with_capacity(starts.len());
        let mut intervals = Vec::with_capacity(starts.len());
        for (a, &start) in starts.iter().enumerate() {
            outliers.push(self.outlier_center(&mut rng, &std_normal, max_spread));
            for s in sources.iter_mut().skip(start).take(self.anomaly_frames) {
                *s = Some(FrameSource::Anomaly(a));
            }
            intervals.push(Interval {
                start_s: start as f64 * self.frame_duration,
                end_s: (start + self.anomaly_frames) as f64 * self.frame_duration,
            });
        }

        let picker = WeightedIndex::new(self.clusters.iter().map(|c| c.frequency))
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let mut rows = Vec::with_capacity(self.frames);
        let mut out_sources = Vec::with_capacity(self.frames);
        for (t, slot) in sources.into_iter().enumerate() {
            // Draw the background choice every frame so the background
            // sequence does not depend on the anomaly schedule.
            let k = picker.sample(&mut rng);
            let source = slot.unwrap_or(FrameSource::Background(k));
            let (center, spread): (Vec<f64>, f64) = match source {
                FrameSource::Background(k) => {
                    let c = &self.clusters[k];
                    (
                        drifted_mean(c, &directions[k], self.drift_rate * t as f64),
                        c.spread,
                    )
                }
                FrameSource::Recurring(r) => {
                    let c = &self.recurring[r].cluster;
                    (c.mean.clone(), c.spread)
                }
                FrameSource::Anomaly(a) => (outliers[a].clone(), self.outlier_spread),
            };
            let values = center
                .iter()
                .map(|m| m + spread * std_normal.sample(&mut rng))
                .collect();
            rows.push(FeatureRow {
                time_s: t as f64 * self.frame_duration,
                values,
            });
            out_sources.push(source);
        }
        Ok(SyntheticStream {
            rows,
            sources: out_sources,
            intervals,
        })
    }

    /// Non-overlapping burst starts after the warm-up, avoiding recurring
    /// events and keeping one burst length of clearance between bursts.
    fn place_anomalies(&self, rng: &mut ChaCha8Rng, taken: &[Option<FrameSource>]) -> Vec<usize> {
        let len = self.anomaly_frames;
        let wanted = (self.anomaly_fraction * self.frames as f64 / len as f64).round() as usize;
        if wanted == 0 || self.frames < self.warmup_frames + len {
            return Vec::new();
        }
        let mut busy: Vec<bool> = taken.iter().map(Option::is_some).collect();
        let mut starts = Vec::with_capacity(wanted);
        let mut tries = 0;
        while starts.len() < wanted && tries < 1000 * wanted {
            tries += 1;
            let s = rng.gen_range(self.warmup_frames..=self.frames - len);
            let lo = s.saturating_sub(len);
            let hi = (s + 2 * len).min(self.frames);
            if busy[lo..hi].iter().any(|&b| b) {
                continue;
            }
            for b in &mut busy[s..s + len] {
                *b = true;
            }
            starts.push(s);
        }
        starts.sort_unstable();
        starts
    }

    /// A random direction scaled like the cluster means, redrawn until it is
    /// far from, and not aligned with, every cluster.
    fn outlier_center(&self, rng: &mut ChaCha8Rng, normal: &Normal<f64>, spread: f64) -> Vec<f64> {
        let radius = self
            .clusters
            .iter()
            .map(|c| norm(&c.mean))
            .fold(0.0, f64::max)
            .max(1.0);
        let min_dist = self.outlier_sigma * spread;
        let mut candidate = Vec::new();
        for _ in 0..10_000 {
            candidate = unit_vector(self.dim, rng, normal)
                .into_iter()
                .map(|x| x * radius)
                .collect();
            let ok = self.clusters.iter().all(|c| {
                let dist = norm(
                    &c.mean
                        .iter()
                        .zip(&candidate)
                        .map(|(a, b)| a - b)
                        .collect::<Vec<_>>(),
                );
                dist >= min_dist && cosine_unchecked(&c.mean, &candidate) <= self.outlier_max_cosine
            });
            if ok {
                break;
            }
        }
        candidate
    }
}

/// Cluster mean after travelling `distance` along its drift path.
fn drifted_mean(c: &Cluster, direction: &[f64], distance: f64) -> Vec<f64> {
    match &c.drift_target {
        Some(target) => {
            let gap: Vec<f64> = target.iter().zip(&c.mean).map(|(t, m)| t - m).collect();
            let len = norm(&gap);
            if len <= distance {
                return target.clone();
            }
            c.mean
                .iter()
                .zip(&gap)
                .map(|(m, g)| m + g * distance / len)
                .collect()
        }
        None => c
            .mean
            .iter()
            .zip(direction)
            .map(|(m, d)| m + distance * d)
            .collect(),
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn unit_vector(dim: usize, rng: &mut ChaCha8Rng, normal: &Normal<f64>) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| normal.sample(rng)).collect();
        let n = norm(&v);
        if n > 1e-9 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}
