//! Run configuration: defaults, a flat `key=value` file, and flag overrides.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use huffguard::baselines::AgmmConfig;
use huffguard::synth::{block_clusters, SyntheticSpec};
use huffguard::{DetectorConfig, UpdateParams};

use crate::error::CliError;

/// Which model scores the stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Proposed,
    #[value(alias = "fixed_tree")]
    FixedTree,
    Agmm,
}

impl Mode {
    fn from_str_value(s: &str) -> Result<Self, String> {
        <Mode as ValueEnum>::from_str(s, true)
            .map_err(|_| format!("unknown mode {s} (expected proposed, fixed-tree or agmm)"))
    }
}

/// Every tunable of a run. Keys in a config file use the field names;
/// flags use the same names with `-` for `_`.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub theta_cos: f64,
    pub theta_merge: f64,
    pub alpha: f64,
    pub w_o: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub merge: bool,
    pub normalize: bool,
    pub frame_duration: f64,
    pub event_duration: f64,
    pub event_step: f64,
    pub limit_fraction: f64,
    pub capacity: usize,
    pub k: usize,
    pub agmm_alpha_w: f64,
    pub agmm_alpha_g: f64,
    pub agmm_w_o: f64,
    pub agmm_theta: f64,
    pub agmm_initial_var: f64,
    pub agmm_var_floor: f64,
    pub seed: u64,
    pub frames: usize,
    pub dim: usize,
    pub clusters: usize,
    pub cluster_scale: f64,
    pub cluster_spread: f64,
    pub drift_rate: f64,
    pub anomaly_fraction: f64,
    pub anomaly_frames: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = UpdateParams::default();
        let g = AgmmConfig::default();
        let s = SyntheticSpec::default();
        Self {
            mode: Mode::Proposed,
            theta_cos: p.theta_cos,
            theta_merge: p.theta_merge,
            alpha: p.alpha,
            w_o: p.w_o,
            gamma_min: p.gamma_min,
            gamma_max: p.gamma_max,
            merge: true,
            normalize: true,
            frame_duration: 0.5,
            event_duration: 4.0,
            event_step: 2.0,
            limit_fraction: 1.0,
            capacity: 9,
            k: g.k,
            agmm_alpha_w: g.alpha_w,
            agmm_alpha_g: g.alpha_g,
            agmm_w_o: g.w_o,
            agmm_theta: g.theta,
            agmm_initial_var: g.initial_var,
            agmm_var_floor: g.var_floor,
            seed: s.seed,
            frames: s.frames,
            dim: s.dim,
            clusters: s.clusters.len(),
            cluster_scale: 4.0,
            cluster_spread: 0.15,
            drift_rate: s.drift_rate,
            anomaly_fraction: s.anomaly_fraction,
            anomaly_frames: s.anomaly_frames,
        }
    }
}

/// Config keys, in file order.
#[cfg(test)]
pub const KEYS: [&str; 30] = [
    "mode",
    "theta_cos",
    "theta_merge",
    "alpha",
    "w_o",
    "gamma_min",
    "gamma_max",
    "merge",
    "normalize",
    "frame_duration",
    "event_duration",
    "event_step",
    "limit_fraction",
    "capacity",
    "k",
    "agmm_alpha_w",
    "agmm_alpha_g",
    "agmm_w_o",
    "agmm_theta",
    "agmm_initial_var",
    "agmm_var_floor",
    "seed",
    "frames",
    "dim",
    "clusters",
    "cluster_scale",
    "cluster_spread",
    "drift_rate",
    "anomaly_fraction",
    "anomaly_frames",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: Display,
{
    value
        .parse()
        .map_err(|e| CliError::Config(format!("{key}: cannot parse {value:?}: {e}")))
}

impl RunConfig {
    /// Set one key from its text form. `-` and `_` are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = key.trim().replace('-', "_");
        let v = value.trim();
        let k = key.as_str();
        match k {
            "mode" => self.mode = Mode::from_str_value(v).map_err(CliError::Config)?,
            "theta_cos" => self.theta_cos = parse(k, v)?,
            "theta_merge" => self.theta_merge = parse(k, v)?,
            "alpha" => self.alpha = parse(k, v)?,
            "w_o" => self.w_o = parse(k, v)?,
            "gamma_min" => self.gamma_min = parse(k, v)?,
            "gamma_max" => self.gamma_max = parse(k, v)?,
            "merge" => self.merge = parse(k, v)?,
            "normalize" => self.normalize = parse(k, v)?,
            "frame_duration" => self.frame_duration = parse(k, v)?,
            "event_duration" => self.event_duration = parse(k, v)?,
            "event_step" => self.event_step = parse(k, v)?,
            "limit_fraction" => self.limit_fraction = parse(k, v)?,
            "capacity" => self.capacity = parse(k, v)?,
            "k" => self.k = parse(k, v)?,
            "agmm_alpha_w" => self.agmm_alpha_w = parse(k, v)?,
            "agmm_alpha_g" => self.agmm_alpha_g = parse(k, v)?,
            "agmm_w_o" => self.agmm_w_o = parse(k, v)?,
            "agmm_theta" => self.agmm_theta = parse(k, v)?,
            "agmm_initial_var" => self.agmm_initial_var = parse(k, v)?,
            "agmm_var_floor" => self.agmm_var_floor = parse(k, v)?,
            "seed" => self.seed = parse(k, v)?,
            "frames" => self.frames = parse(k, v)?,
            "dim" => self.dim = parse(k, v)?,
            "clusters" => self.clusters = parse(k, v)?,
            "cluster_scale" => self.cluster_scale = parse(k, v)?,
            "cluster_spread" => self.cluster_spread = parse(k, v)?,
            "drift_rate" => self.drift_rate = parse(k, v)?,
            "anomaly_fraction" => self.anomaly_fraction = parse(k, v)?,
            "anomaly_frames" => self.anomaly_frames = parse(k, v)?,
            _ => return Err(CliError::Config(format!("unknown key {key}"))),
        }
        Ok(())
    }

    /// Apply a `key=value` text. Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("{origin} line {}: expected key=value", i + 1))
            })?;
            self.set(key, value).map_err(|e| {
                CliError::Config(format!("{origin} line {}: {}", i + 1, e.message()))
            })?;
        }
        Ok(())
    }

    /// Defaults, then the config file if any, then flags.
    pub fn resolve(file: Option<&Path>, flags: &Tunables) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            cfg.apply_text(&text, &path.display().to_string())?;
        }
        for (key, value) in flags.overrides() {
            cfg.set(key, &value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn params(&self) -> UpdateParams {
        UpdateParams {
            theta_cos: self.theta_cos,
            theta_merge: self.theta_merge,
            alpha: self.alpha,
            w_o: self.w_o,
            gamma_min: self.gamma_min,
            gamma_max: self.gamma_max,
        }
    }

    pub fn detector(&self) -> DetectorConfig {
        DetectorConfig {
            params: self.params(),
            merge: self.merge,
            normalize: self.normalize,
        }
    }

    pub fn agmm(&self) -> AgmmConfig {
        AgmmConfig {
            k: self.k,
            alpha_w: self.agmm_alpha_w,
            alpha_g: self.agmm_alpha_g,
            w_o: self.agmm_w_o,
            theta: self.agmm_theta,
            initial_var: self.agmm_initial_var,
            var_floor: self.agmm_var_floor,
        }
    }

    pub fn synthetic(&self) -> SyntheticSpec {
        SyntheticSpec {
            dim: self.dim,
            clusters: block_clusters(
                self.dim,
                self.clusters,
                self.cluster_scale,
                self.cluster_spread,
            ),
            drift_rate: self.drift_rate,
            anomaly_fraction: self.anomaly_fraction,
            anomaly_frames: self.anomaly_frames,
            frames: self.frames,
            frame_duration: self.frame_duration,
            seed: self.seed,
            ..SyntheticSpec::default()
        }
    }

    /// Frames per event and frames per event step.
    pub fn event_geometry(&self) -> (usize, usize) {
        let frames = |secs: f64| (secs / self.frame_duration).round() as usize;
        (frames(self.event_duration), frames(self.event_step))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params().validate()?;
        self.agmm().validate()?;
        let bad = |msg: String| Err(CliError::Core(huffguard::Error::InvalidParameter(msg)));
        if !(self.frame_duration > 0.0 && self.frame_duration.is_finite()) {
            return bad(format!(
                "frame_duration must be positive, got {}",
                self.frame_duration
            ));
        }
        let (event, step) = self.event_geometry();
        for (name, secs, n) in [
            ("event_duration", self.event_duration, event),
            ("event_step", self.event_step, step),
        ] {
            let exact = secs / self.frame_duration;
            if n == 0 || (exact - n as f64).abs() > 1e-6 {
                return bad(format!(
                    "{name} {secs} is not a positive multiple of frame_duration {}",
                    self.frame_duration
                ));
            }
        }
        if step > event {
            return bad("event_step must not exceed event_duration".into());
        }
        if !(self.limit_fraction > 0.0 && self.limit_fraction <= 1.0) {
            return bad(format!(
                "limit_fraction must be in (0, 1], got {}",
                self.limit_fraction
            ));
        }
        if self.capacity < 2 {
            return bad(format!(
                "capacity must be at least 2, got {}",
                self.capacity
            ));
        }
        if self.clusters > self.dim {
            return bad(format!(
                "clusters ({}) must not exceed dim ({})",
                self.clusters, self.dim
            ));
        }
        Ok(())
    }
}

/// Flags that override config keys of the same name.
#[derive(Args, Clone, Debug, Default)]
pub struct Tunables {
    /// Config file of key=value lines.
    #[arg(long, env = "HUFFGUARD_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub theta_cos: Option<f64>,
    #[arg(long)]
    pub theta_merge: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub w_o: Option<f64>,
    #[arg(long)]
    pub gamma_min: Option<f64>,
    #[arg(long)]
    pub gamma_max: Option<f64>,
    #[arg(long)]
    pub merge: Option<bool>,
    #[arg(long)]
    pub normalize: Option<bool>,
    #[arg(long)]
    pub frame_duration: Option<f64>,
    #[arg(long)]
    pub event_duration: Option<f64>,
    #[arg(long)]
    pub event_step: Option<f64>,
    #[arg(long)]
    pub limit_fraction: Option<f64>,
    #[arg(long)]
    pub capacity: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub agmm_alpha_w: Option<f64>,
    #[arg(long)]
    pub agmm_alpha_g: Option<f64>,
    #[arg(long)]
    pub agmm_w_o: Option<f64>,
    #[arg(long)]
    pub agmm_theta: Option<f64>,
    #[arg(long)]
    pub agmm_initial_var: Option<f64>,
    #[arg(long)]
    pub agmm_var_floor: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub frames: Option<usize>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub clusters: Option<usize>,
    #[arg(long)]
    pub cluster_scale: Option<f64>,
    #[arg(long)]
    pub cluster_spread: Option<f64>,
    #[arg(long)]
    pub drift_rate: Option<f64>,
    #[arg(long)]
    pub anomaly_fraction: Option<f64>,
    #[arg(long)]
    pub anomaly_frames: Option<usize>,
}

impl Tunables {
    /// Flags that were given, as `(key, value)` text pairs.
    pub fn overrides(&self) -> Vec<(&'static str, String)> {
        fn push<T: ToString>(
            out: &mut Vec<(&'static str, String)>,
            key: &'static str,
            v: &Option<T>,
        ) {
            if let Some(v) = v {
                out.push((key, v.to_string()));
            }
        }
        let mut out = Vec::new();
        if let Some(m) = self.mode {
            let name = m
                .to_possible_value()
                .expect("mode has a name")
                .get_name()
                .to_string();
            out.push(("mode", name));
        }
        push(&mut out, "theta_cos", &self.theta_cos);
        push(&mut out, "theta_merge", &self.theta_merge);
        push(&mut out, "alpha", &self.alpha);
        push(&mut out, "w_o", &self.w_o);
        push(&mut out, "gamma_min", &self.gamma_min);
        push(&mut out, "gamma_max", &self.gamma_max);
        push(&mut out, "merge", &self.merge);
        push(&mut out, "normalize", &self.normalize);
        push(&mut out, "frame_duration", &self.frame_duration);
        push(&mut out, "event_duration", &self.event_duration);
        push(&mut out, "event_step", &self.event_step);
        push(&mut out, "limit_fraction", &self.limit_fraction);
        push(&mut out, "capacity", &self.capacity);
        push(&mut out, "k", &self.k);
        push(&mut out, "agmm_alpha_w", &self.agmm_alpha_w);
        push(&mut out, "agmm_alpha_g", &self.agmm_alpha_g);
        push(&mut out, "agmm_w_o", &self.agmm_w_o);
        push(&mut out, "agmm_theta", &self.agmm_theta);
        push(&mut out, "agmm_initial_var", &self.agmm_initial_var);
        push(&mut out, "agmm_var_floor", &self.agmm_var_floor);
        push(&mut out, "seed", &self.seed);
        push(&mut out, "frames", &self.frames);
        push(&mut out, "dim", &self.dim);
        push(&mut out, "clusters", &self.clusters);
        push(&mut out, "cluster_scale", &self.cluster_scale);
        push(&mut out, "cluster_spread", &self.cluster_spread);
        push(&mut out, "drift_rate", &self.drift_rate);
        push(&mut out, "anomaly_fraction", &self.anomaly_fraction);
        push(&mut out, "anomaly_frames", &self.anomaly_frames);
        out
    }
}
