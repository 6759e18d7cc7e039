use crate::error::{Error, Result};

/// Hyper-parameters of the adaptive tree.
#[derive(Clone, Debug, PartialEq)]
pub struct UpdateParams {
    /// Cosine similarity a frame needs to count as a hit.
    pub theta_cos: f64,
    /// Cosine similarity above which two modes are merged.
    pub theta_merge: f64,
    /// Weight learning rate.
    pub alpha: f64,
    /// Weight given to a freshly created mode.
    pub w_o: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
}

impl Default for UpdateParams {
    fn default() -> Self {
        Self {
            theta_cos: 0.93,
            theta_merge: 0.97,
            alpha: 1e-4,
            w_o: 1e-3,
            gamma_min: 0.0,
            gamma_max: 0.5,
        }
    }
}

impl UpdateParams {
    pub fn new(
        theta_cos: f64,
        theta_merge: f64,
        alpha: f64,
        w_o: f64,
        gamma_min: f64,
        gamma_max: f64,
    ) -> Result<Self> {
        let params = Self {
            theta_cos,
            theta_merge,
            alpha,
            w_o,
            gamma_min,
            gamma_max,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, msg: String) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter(msg))
            }
        }
        check(
            self.theta_cos > -1.0 && self.theta_cos < 1.0,
            format!("theta_cos must be in (-1, 1), got {}", self.theta_cos),
        )?;
        check(
            self.theta_merge > 0.0 && self.theta_merge < 1.0,
            format!("theta_merge must be in (0, 1), got {}", self.theta_merge),
        )?;
        check(
            self.alpha > 0.0 && self.alpha < 1.0,
            format!("alpha must be in (0, 1), got {}", self.alpha),
        )?;
        check(
            self.w_o > 0.0 && self.w_o.is_finite(),
            format!("w_o must be positive, got {}", self.w_o),
        )?;
        check(
            0.0 <= self.gamma_min && self.gamma_min < self.gamma_max && self.gamma_max <= 1.0,
            format!(
                "need 0 <= gamma_min < gamma_max <= 1, got {} and {}",
                self.gamma_min, self.gamma_max
            ),
        )
    }

    /// Mean update factor for a hit with the given similarity.
    ///
    /// Linear in similarity: `gamma_min` at the hit threshold, `gamma_max`
    /// for a perfect match.
    pub fn gamma(&self, similarity: f64) -> f64 {
        let s = similarity.clamp(self.theta_cos, 1.0);
        (s - self.theta_cos) / (1.0 - self.theta_cos) * (self.gamma_max - self.gamma_min)
            + self.gamma_min
    }

    /// Weight of a node after one hit.
    pub fn hit_weight(&self, weight: f64) -> f64 {
        (1.0 - self.alpha) * weight + self.alpha
    }
}
