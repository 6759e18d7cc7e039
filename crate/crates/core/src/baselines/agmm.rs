use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct AgmmConfig {
    /// Number of components.
    pub k: usize,
    /// Weight learning rate.
    pub alpha_w: f64,
    /// Mean and variance learning rate.
    pub alpha_g: f64,
    /// Weight given to a component that replaces the weakest one.
    pub w_o: f64,
    /// Largest diagonal Mahalanobis distance that still counts as a match.
    pub theta: f64,
    pub initial_var: f64,
    pub var_floor: f64,
}

impl Default for AgmmConfig {
    fn default() -> Self {
        Self {
            k: 5,
            alpha_w: 1e-3,
            alpha_g: 1e-2,
            w_o: 1e-3,
            theta: 4.5,
            initial_var: 1.0,
            var_floor: 1e-4,
        }
    }
}

impl AgmmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidParameter(format!(
                "mixture needs at least 2 components, got {}",
                self.k
            )));
        }
        let rates = [("alpha_w", self.alpha_w), ("alpha_g", self.alpha_g)];
        for (name, v) in rates {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be in (0, 1), got {v}"
                )));
            }
        }
        if !(self.w_o > 0.0 && self.w_o < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "w_o must be in (0, 1), got {}",
                self.w_o
            )));
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "theta must be positive, got {}",
                self.theta
            )));
        }
        if !(self.var_floor > 0.0 && self.initial_var >= self.var_floor) {
            return Err(Error::InvalidParameter(format!(
                "initial variance {} below floor {}",
                self.initial_var, self.var_floor
            )));
        }
        Ok(())
    }
}

/// One diagonal Gaussian.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub weight: f64,
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

impl Component {
    /// Diagonal Mahalanobis distance.
    pub fn distance(&self, f: &[f64]) -> f64 {
        self.mean
            .iter()
            .zip(&self.var)
            .zip(f)
            .map(|((m, v), x)| (x - m).powi(2) / v)
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgmmOutcome {
    /// Rank of the responsible component by descending weight over `K - 1`.
    pub score: f64,
    pub replaced: bool,
    pub component: usize,
}

/// Adaptive Gaussian mixture with match, update and replace-the-weakest
/// steps.
#[derive(Clone, Debug)]
pub struct AgmmModel {
    config: AgmmConfig,
    components: Vec<Component>,
    replace_count: u64,
}

impl AgmmModel {
    pub fn new(config: AgmmConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            components: Vec::new(),
            replace_count: 0,
        })
    }

    pub fn config(&self) -> &AgmmConfig {
        &self.config
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn replace_count(&self) -> u64 {
        self.replace_count
    }

    /// Absorb one (already scaled) feature vector.
    ///
    /// Until `K` distinct vectors have been seen, each new one seeds a
    /// component and the seeded weights are kept equal.
    pub fn step(&mut self, f: &[f64]) -> Result<AgmmOutcome> {
        if let Some(c) = self.components.first() {
            if c.mean.len() != f.len() {
                return Err(Error::DimensionMismatch {
                    expected: c.mean.len(),
                    got: f.len(),
                });
            }
        }
        let cfg = &self.config;
        let seeding = self.components.len() < cfg.k;
        if seeding && self.components.iter().all(|c| c.mean != f) {
            self.components.push(Component {
                weight: 0.0,
                mean: f.to_vec(),
                var: vec![cfg.initial_var; f.len()],
            });
            let w = 1.0 / self.components.len() as f64;
            for c in &mut self.components {
                c.weight = w;
            }
            return Ok(AgmmOutcome {
                score: 1.0,
                replaced: false,
                component: self.components.len() - 1,
            });
        }

        let nearest = self
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.distance(f)))
            .fold(None::<(usize, f64)>, |best, (i, d)| match best {
                Some((_, b)) if b <= d => best,
                _ => Some((i, d)),
            });
        let (component, replaced) = match nearest {
            Some((i, d)) if d <= cfg.theta => {
                for (j, c) in self.components.iter_mut().enumerate() {
                    let hit = if j == i { 1.0 } else { 0.0 };
                    c.weight = (1.0 - cfg.alpha_w) * c.weight + cfg.alpha_w * hit;
                }
                let c = &mut self.components[i];
                for ((m, v), x) in c.mean.iter_mut().zip(c.var.iter_mut()).zip(f) {
                    *m = (1.0 - cfg.alpha_g) * *m + cfg.alpha_g * x;
                    let diff = x - *m;
                    *v = ((1.0 - cfg.alpha_g) * *v + cfg.alpha_g * diff * diff).max(cfg.var_floor);
                }
                (i, false)
            }
            _ => {
                let i = self.weakest();
                self.components[i] = Component {
                    weight: cfg.w_o,
                    mean: f.to_vec(),
                    var: vec![cfg.initial_var; f.len()],
                };
                self.replace_count += 1;
                (i, true)
            }
        };
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        for c in &mut self.components {
            c.weight /= total;
        }
        Ok(AgmmOutcome {
            score: self.rank(component) as f64 / (self.config.k - 1) as f64,
            replaced,
            component,
        })
    }

    /// Lightest component; ties go to the lowest index.
    fn weakest(&self) -> usize {
        let mut best = 0;
        for (i, c) in self.components.iter().enumerate() {
            if c.weight < self.components[best].weight {
                best = i;
            }
        }
        best
    }

    /// Position of component `i` when sorted by descending weight, ties
    /// ordered by index.
    fn rank(&self, i: usize) -> usize {
        let wi = self.components[i].weight;
        self.components
            .iter()
            .enumerate()
            .filter(|&(j, c)| c.weight > wi || (c.weight == wi && j < i))
            .count()
    }
}
