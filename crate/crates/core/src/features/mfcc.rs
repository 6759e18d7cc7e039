use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Lower bound on a mel band energy before taking the log.
pub const MEL_FLOOR: f64 = 1e-10;
/// Added to the frame energy before taking the log.
pub const ENERGY_FLOOR: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureConfig {
    pub sample_rate: u32,
    /// Samples per analysis window; frames must be at least this long.
    pub window_len: usize,
    pub n_mfcc: usize,
    pub n_filters: usize,
}

impl FeatureConfig {
    /// 13 cepstra over 26 mel bands, one window per frame.
    pub fn for_frames(sample_rate: u32, frame_duration: f64) -> Result<Self> {
        Ok(Self {
            sample_rate,
            window_len: super::wav::frame_len(sample_rate, frame_duration)?,
            n_mfcc: 13,
            n_filters: 26,
        })
    }

    pub fn dim(&self) -> usize {
        self.n_mfcc + 2
    }

    pub fn fft_len(&self) -> usize {
        self.window_len.next_power_of_two()
    }
}

/// Maps a frame to `[c1..c_n, log_energy, zcr]`.
///
/// Cepstra come from a Hamming-windowed, zero-padded power spectrum pooled
/// by triangular mel filters spanning 0 Hz to Nyquist, then an orthonormal
/// DCT-II of the log band energies with the 0th coefficient dropped.
pub struct FeatureExtractor {
    config: FeatureConfig,
    window: Vec<f64>,
    filters: Vec<Vec<f64>>,
    dct: Vec<Vec<f64>>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FeatureExtractor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FeatureExtractor")
            .field("config", &self.config)
            .finish()
    }
}

impl FeatureExtractor {
    pub fn new(config: FeatureConfig) -> Result<Self> {
        if config.sample_rate == 0 || config.window_len < 2 {
            return Err(Error::InvalidParameter(format!(
                "window of {} samples at {} Hz",
                config.window_len, config.sample_rate
            )));
        }
        if config.n_filters < 2 || config.n_mfcc == 0 || config.n_mfcc >= config.n_filters {
            return Err(Error::InvalidParameter(format!(
                "{} cepstra from {} mel filters",
                config.n_mfcc, config.n_filters
            )));
        }
        let nfft = config.fft_len();
        let n = config.window_len;
        let window = (0..n)
            .map(|i| 0.54 - 0.46 * (2.0 * PI * i as f64 / (n - 1) as f64).cos())
            .collect();
        let filters = mel_filterbank(config.n_filters, nfft, f64::from(config.sample_rate));
        let m = config.n_filters as f64;
        let dct = (1..=config.n_mfcc)
            .map(|k| {
                (0..config.n_filters)
                    .map(|j| (2.0 / m).sqrt() * (PI * k as f64 * (j as f64 + 0.5) / m).cos())
                    .collect()
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(nfft);
        Ok(Self {
            config,
            window,
            filters,
            dct,
            fft,
        })
    }

    pub fn config(&self) -> &FeatureConfig {
        &self.config
    }

    pub fn extract(&self, frame: &[f64]) -> Result<Vec<f64>> {
        let n = self.config.window_len;
        if frame.len() < n {
            return Err(Error::FrameTooShort {
                needed: n,
                got: frame.len(),
            });
        }
        let mut buf: Vec<Complex<f64>> = frame[..n]
            .iter()
            .zip(&self.window)
            .map(|(s, w)| Complex::new(s * w, 0.0))
            .collect();
        buf.resize(self.config.fft_len(), Complex::new(0.0, 0.0));
        self.fft.process(&mut buf);
        let power: Vec<f64> = buf[..buf.len() / 2 + 1]
            .iter()
            .map(|c| c.norm_sqr())
            .collect();
        let log_mel: Vec<f64> = self
            .filters
            .iter()
            .map(|f| {
                let e: f64 = f.iter().zip(&power).map(|(a, b)| a * b).sum();
                e.max(MEL_FLOOR).ln()
            })
            .collect();

        let mut out: Vec<f64> = self
            .dct
            .iter()
            .map(|row| row.iter().zip(&log_mel).map(|(a, b)| a * b).sum())
            .collect();
        out.push(log_energy(frame));
        out.push(zero_crossing_rate(frame));
        Ok(out)
    }
}

pub(crate) fn log_energy(frame: &[f64]) -> f64 {
    (frame.iter().map(|s| s * s).sum::<f64>() + ENERGY_FLOOR).ln()
}

/// Sign changes between neighbours over `len - 1`; zero counts as positive.
pub(crate) fn zero_crossing_rate(frame: &[f64]) -> f64 {
    if frame.len() < 2 {
        return 0.0;
    }
    let changes = frame
        .windows(2)
        .filter(|w| (w[0] >= 0.0) != (w[1] >= 0.0))
        .count();
    changes as f64 / (frame.len() - 1) as f64
}

fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular filters with centers evenly spaced in mel from 0 to Nyquist,
/// evaluated at each bin's center frequency.
fn mel_filterbank(n_filters: usize, nfft: usize, sample_rate: f64) -> Vec<Vec<f64>> {
    let nyquist = sample_rate / 2.0;
    let top = hz_to_mel(nyquist);
    let edges: Vec<f64> = (0..n_filters + 2)
        .map(|i| mel_to_hz(top * i as f64 / (n_filters + 1) as f64))
        .collect();
    let bins = nfft / 2 + 1;
    (0..n_filters)
        .map(|m| {
            let (lo, mid, hi) = (edges[m], edges[m + 1], edges[m + 2]);
            (0..bins)
                .map(|k| {
                    let f = k as f64 * sample_rate / nfft as f64;
                    if f <= lo || f >= hi {
                        0.0
                    } else if f <= mid {
                        (f - lo) / (mid - lo)
                    } else {
                        (hi - f) / (hi - mid)
                    }
                })
                .collect()
        })
        .collect()
}
