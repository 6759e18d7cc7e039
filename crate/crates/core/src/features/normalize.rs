use crate::error::{Error, Result};

/// Added to the running standard deviation before dividing.
pub const STD_FLOOR: f64 = 1e-8;

/// Streaming per-dimension z-scaling (Welford recurrences).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NormalizerState {
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl NormalizerState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Population standard deviation per dimension.
    pub fn std(&self) -> Vec<f64> {
        if self.count == 0 {
            return vec![0.0; self.mean.len()];
        }
        self.m2
            .iter()
            .map(|m| (m / self.count as f64).sqrt())
            .collect()
    }

    /// Scale `v` with the statistics seen so far, then fold `v` into them.
    /// The first vector maps to zeros.
    pub fn normalize(&mut self, v: &[f64]) -> Result<Vec<f64>> {
        if self.count == 0 {
            self.mean = vec![0.0; v.len()];
            self.m2 = vec![0.0; v.len()];
        } else if v.len() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                got: v.len(),
            });
        }
        let out = if self.count == 0 {
            vec![0.0; v.len()]
        } else {
            let n = self.count as f64;
            v.iter()
                .zip(&self.mean)
                .zip(&self.m2)
                .map(|((x, m), m2)| (x - m) / ((m2 / n).sqrt() + STD_FLOOR))
                .collect()
        };
        self.count += 1;
        let n = self.count as f64;
        for ((x, m), m2) in v.iter().zip(self.mean.iter_mut()).zip(self.m2.iter_mut()) {
            let delta = x - *m;
            *m += delta / n;
            *m2 += delta * (x - *m);
        }
        Ok(out)
    }
}
