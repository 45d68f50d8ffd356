//! Environment configuration: container parameters, loading, validation and
//! the synthetic configurations shipped under `configs/`.
//!
//! Configs store physical quantities per second. The engine converts them to
//! per-step quantities with [`ContainerParams::drift_per_step`] and
//! [`ContainerParams::noise_std_per_step`], so one plant description is valid
//! at any timestep length.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::reward;

/// Relative tolerance used when checking that an optimum is a multiple of the
/// product size. Config files are hand-written decimals.
const MULTIPLE_TOLERANCE: f64 = 1e-9;

/// Slack above 1 allowed by [`validate_reward_landscape`] before it warns.
pub const LANDSCAPE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("failed to read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed config document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("unsupported grid point (n={n}, m={m}, delta={delta}): {reason}")]
    UnsupportedGridPoint {
        n: usize,
        m: usize,
        delta: f64,
        reason: &'static str,
    },
}

impl ConfigError {
    fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

/// One Gaussian peak of the emptying reward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    /// Emptying volume at the peak centre (volume units).
    pub volume: f64,
    /// Peak height in `(0, 1]`.
    pub height: f64,
    /// Standard deviation of the bell (volume units).
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainerParams {
    pub name: String,
    /// Mean inflow in volume units per second.
    pub fill_rate: f64,
    /// Inflow noise in volume units per square-root second.
    pub noise_std_per_sec: f64,
    pub product_size: f64,
    /// Seconds needed to actuate a PU before the first product.
    pub actuation_time: f64,
    pub time_per_product: f64,
    /// Reward peaks; the first entry is the ideal optimum with height 1.
    pub optima: Vec<Optimum>,
}

impl ContainerParams {
    /// Mean volume added per step of `timestep_seconds`.
    pub fn drift_per_step(&self, timestep_seconds: f64) -> f64 {
        self.fill_rate * timestep_seconds
    }

    /// Standard deviation of the per-step noise (diffusive scaling).
    pub fn noise_std_per_step(&self, timestep_seconds: f64) -> f64 {
        self.noise_std_per_sec * timestep_seconds.sqrt()
    }

    /// The height-1 optimum.
    pub fn ideal_volume(&self) -> f64 {
        self.optima[0].volume
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub containers: Vec<ContainerParams>,
    pub pu_count: usize,
    pub max_volume: f64,
    pub timestep_seconds: f64,
    pub max_episode_steps: usize,
    pub reward_min: f64,
    pub reward_penalty: f64,
    pub initial_volume_range: [f64; 2],
}

impl EnvConfig {
    pub fn container_count(&self) -> usize {
        self.containers.len()
    }

    /// Length of the flat observation vector, `n + m`.
    pub fn observation_len(&self) -> usize {
        self.containers.len() + self.pu_count
    }

    /// Number of discrete actions, `n + 1` (do-nothing plus one per container).
    pub fn action_count(&self) -> usize {
        self.containers.len() + 1
    }

    /// Same plant with a different episode horizon, e.g. the 600-step test
    /// environment used for evaluation.
    pub fn with_max_episode_steps(mut self, steps: usize) -> Self {
        self.max_episode_steps = steps;
        self
    }

    /// Checks every structural invariant. The first violation is reported.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.containers.is_empty() {
            return Err(ConfigError::invalid(
                "containers",
                "at least one container is required",
            ));
        }
        if self.pu_count < 1 {
            return Err(ConfigError::invalid("pu_count", "must be at least 1"));
        }
        if !(self.max_volume > 0.0 && self.max_volume.is_finite()) {
            return Err(ConfigError::invalid("max_volume", "must be positive"));
        }
        if !(self.timestep_seconds > 0.0 && self.timestep_seconds.is_finite()) {
            return Err(ConfigError::invalid("timestep_seconds", "must be positive"));
        }
        if self.max_episode_steps < 1 {
            return Err(ConfigError::invalid(
                "max_episode_steps",
                "must be at least 1",
            ));
        }
        if !(self.reward_penalty < 0.0 && self.reward_penalty.is_finite()) {
            return Err(ConfigError::invalid(
                "reward_penalty",
                "reward_penalty must be negative",
            ));
        }
        if !(self.reward_min < self.reward_penalty && self.reward_min.is_finite()) {
            return Err(ConfigError::invalid(
                "reward_min",
                "reward_min must be smaller than reward_penalty",
            ));
        }
        let [lo, hi] = self.initial_volume_range;
        if !(0.0 <= lo && lo <= hi && hi < self.max_volume) {
            return Err(ConfigError::invalid(
                "initial_volume_range",
                "must satisfy 0 <= lo <= hi < max_volume",
            ));
        }
        for (i, c) in self.containers.iter().enumerate() {
            self.validate_container(i, c)?;
        }
        Ok(())
    }

    fn validate_container(&self, i: usize, c: &ContainerParams) -> Result<(), ConfigError> {
        let field = |name: &str| format!("containers[{i}].{name}");
        let positive = |v: f64| v > 0.0 && v.is_finite();
        let non_negative = |v: f64| v >= 0.0 && v.is_finite();

        if !non_negative(c.fill_rate) {
            return Err(ConfigError::invalid(
                field("fill_rate"),
                "must be non-negative",
            ));
        }
        if !non_negative(c.noise_std_per_sec) {
            return Err(ConfigError::invalid(
                field("noise_std_per_sec"),
                "must be non-negative",
            ));
        }
        if !positive(c.product_size) {
            return Err(ConfigError::invalid(
                field("product_size"),
                "must be positive",
            ));
        }
        if !positive(c.actuation_time) {
            return Err(ConfigError::invalid(
                field("actuation_time"),
                "must be positive",
            ));
        }
        if !positive(c.time_per_product) {
            return Err(ConfigError::invalid(
                field("time_per_product"),
                "must be positive",
            ));
        }
        if c.optima.is_empty() {
            return Err(ConfigError::invalid(
                field("optima"),
                "at least one optimum is required",
            ));
        }
        for (k, opt) in c.optima.iter().enumerate() {
            let field = |name: &str| format!("containers[{i}].optima[{k}].{name}");
            if !positive(opt.width) {
                return Err(ConfigError::invalid(
                    field("width"),
                    "width must be positive",
                ));
            }
            if !(opt.height > 0.0 && opt.height <= 1.0) {
                return Err(ConfigError::invalid(
                    field("height"),
                    "height must be in (0, 1]",
                ));
            }
            if k == 0 && opt.height != 1.0 {
                return Err(ConfigError::invalid(
                    field("height"),
                    "the first optimum must be the ideal one with height 1",
                ));
            }
            if k > 0 && opt.height == 1.0 {
                return Err(ConfigError::invalid(
                    field("height"),
                    "only the first optimum may have height 1",
                ));
            }
            if !(opt.volume > 0.0 && opt.volume < self.max_volume) {
                return Err(ConfigError::invalid(
                    field("volume"),
                    "optimum volume must lie strictly inside (0, max_volume)",
                ));
            }
            let products = (opt.volume / c.product_size).round();
            let slack = MULTIPLE_TOLERANCE * opt.volume.max(1.0);
            if products < 1.0 || (products * c.product_size - opt.volume).abs() > slack {
                return Err(ConfigError::invalid(
                    field("volume"),
                    "optimum not a multiple of product size",
                ));
            }
        }
        Ok(())
    }

    /// Short stable identifier derived from the canonical JSON encoding.
    pub fn fingerprint(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&canonical);
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Parses and validates a JSON config document.
pub fn load_config(source: &str) -> Result<EnvConfig, ConfigError> {
    let cfg: EnvConfig = serde_json::from_str(source)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config_file(path: impl AsRef<Path>) -> Result<EnvConfig, ConfigError> {
    load_config(&fs::read_to_string(path)?)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigWarning {
    RewardExceedsOne {
        container: String,
        volume: f64,
        value: f64,
    },
    HeightsNotIncreasing {
        container: String,
    },
    TimestepTooLong {
        timestep_seconds: f64,
        min_single_product_time: f64,
    },
}

impl fmt::Display for ConfigWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigWarning::RewardExceedsOne {
                container,
                volume,
                value,
            } => write!(
                f,
                "{container}: reward exceeds 1 (value {value} at volume {volume}); peaks overlap"
            ),
            ConfigWarning::HeightsNotIncreasing { container } => write!(
                f,
                "{container}: optimum heights do not increase with optimum volume"
            ),
            ConfigWarning::TimestepTooLong {
                timestep_seconds,
                min_single_product_time,
            } => write!(
                f,
                "timestep of {timestep_seconds} s is not shorter than the {min_single_product_time} s \
                 a PU needs for one product; the task may become trivial"
            ),
        }
    }
}

/// Scans the emptying reward of every container on `{0, step, 2*step, ..., max_volume}`.
///
/// Warns when a grid value exceeds `1 + LANDSCAPE_TOLERANCE` (peaks too close
/// together) or when optimum heights are not non-decreasing in volume.
pub fn validate_reward_landscape(cfg: &EnvConfig, grid_step: f64) -> Vec<ConfigWarning> {
    assert!(grid_step > 0.0, "grid_step must be positive");
    let mut warnings = Vec::new();
    let points = (cfg.max_volume / grid_step).floor() as usize;
    for c in &cfg.containers {
        let worst = (0..=points)
            .map(|k| k as f64 * grid_step)
            .map(|v| (v, reward::emptying_reward(v, c, cfg.reward_penalty)))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((volume, value)) = worst {
            if value > 1.0 + LANDSCAPE_TOLERANCE {
                warnings.push(ConfigWarning::RewardExceedsOne {
                    container: c.name.clone(),
                    volume,
                    value,
                });
            }
        }

        let mut by_volume: Vec<&Optimum> = c.optima.iter().collect();
        by_volume.sort_by(|a, b| a.volume.total_cmp(&b.volume));
        if by_volume.windows(2).any(|w| w[1].height < w[0].height) {
            warnings.push(ConfigWarning::HeightsNotIncreasing {
                container: c.name.clone(),
            });
        }
    }
    warnings
}

/// Warns when a timestep is not shorter than the time a PU needs to process
/// the volume of a single product, `actuation_time + time_per_product`.
pub fn timestep_warnings(cfg: &EnvConfig) -> Vec<ConfigWarning> {
    let min_single_product_time = cfg
        .containers
        .iter()
        .map(|c| c.actuation_time + c.time_per_product)
        .fold(f64::INFINITY, f64::min);
    if cfg.timestep_seconds < min_single_product_time {
        Vec::new()
    } else {
        vec![ConfigWarning::TimestepTooLong {
            timestep_seconds: cfg.timestep_seconds,
            min_single_product_time,
        }]
    }
}

/// Container counts, PU counts and timestep lengths of the shipped grid.
pub const GRID_CONTAINERS: [usize; 2] = [5, 11];
pub const GRID_PUS: [usize; 3] = [2, 5, 11];
pub const GRID_TIMESTEPS: [f64; 2] = [60.0, 120.0];

/// Fill rates (volume units per second) of the synthetic containers, in
/// config order. The first five make up the 5-container plants; all rates
/// stay within one band so the 11-container plants are not dominated by a
/// few very fast containers.
const SYNTHETIC_FILL_RATES: [f64; 11] = [
    0.002, 0.004, 0.005, 0.006, 0.007, 0.008, 0.003, 0.0035, 0.0045, 0.0055, 0.0065,
];

fn synthetic_container(fill_rate: f64) -> ContainerParams {
    let label = (fill_rate * 10_000.0).round() as u32;
    ContainerParams {
        name: format!("C1-{label}"),
        fill_rate,
        noise_std_per_sec: 0.01,
        product_size: 5.0,
        actuation_time: 120.0,
        time_per_product: 40.0,
        optima: vec![
            Optimum {
                volume: 35.0,
                height: 1.0,
                width: 1.5,
            },
            Optimum {
                volume: 25.0,
                height: 0.7,
                width: 1.5,
            },
            Optimum {
                volume: 15.0,
                height: 0.4,
                width: 1.5,
            },
        ],
    }
}

/// Synthetic plant for one point of the experiment grid
/// `{5, 11} x {2, 5, 11} x {60, 120}` with `m <= n`.
pub fn default_config(n: usize, m: usize, delta: f64) -> Result<EnvConfig, ConfigError> {
    let unsupported = |reason| ConfigError::UnsupportedGridPoint {
        n,
        m,
        delta,
        reason,
    };
    if !GRID_CONTAINERS.contains(&n) {
        return Err(unsupported("container count must be 5 or 11"));
    }
    if !GRID_PUS.contains(&m) {
        return Err(unsupported("PU count must be 2, 5 or 11"));
    }
    if m > n {
        return Err(unsupported("more PUs than containers"));
    }
    if !GRID_TIMESTEPS.contains(&delta) {
        return Err(unsupported("timestep must be 60 or 120 seconds"));
    }
    Ok(EnvConfig {
        containers: SYNTHETIC_FILL_RATES[..n]
            .iter()
            .map(|&rate| synthetic_container(rate))
            .collect(),
        pu_count: m,
        max_volume: 40.0,
        timestep_seconds: delta,
        max_episode_steps: 1500,
        reward_min: -1.0,
        reward_penalty: -0.1,
        initial_volume_range: [0.0, 30.0],
    })
}

/// Every supported grid point, in `(n, m, delta)` order.
pub fn grid_points() -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for n in GRID_CONTAINERS {
        for m in GRID_PUS.into_iter().filter(|&m| m <= n) {
            for delta in GRID_TIMESTEPS {
                out.push((n, m, delta));
            }
        }
    }
    out
}

/// File name of a shipped config, e.g. `synthetic-5-2-120.json`.
pub fn shipped_config_name(n: usize, m: usize, delta: f64) -> String {
    format!("synthetic-{n}-{m}-{delta}.json")
}

/// Parses grid specs such as `5,2,120`.
pub fn parse_grid_point(text: &str) -> Result<(usize, usize, f64), String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected n,m,delta but got `{text}`"));
    }
    let n = parts[0]
        .parse()
        .map_err(|_| format!("bad container count `{}`", parts[0]))?;
    let m = parts[1]
        .parse()
        .map_err(|_| format!("bad PU count `{}`", parts[1]))?;
    let delta = parts[2]
        .parse()
        .map_err(|_| format!("bad timestep `{}`", parts[2]))?;
    Ok((n, m, delta))
}
