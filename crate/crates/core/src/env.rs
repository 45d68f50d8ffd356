//! The environment state machine.
//!
//! Randomness comes from one ChaCha8 stream per episode, seeded with
//! `ChaCha8Rng::seed_from_u64(seed)`. `reset` draws the initial volumes as
//! `lo + (hi - lo) * u` with `u` a 53-bit uniform in `[0, 1)`, one per
//! container in index order. Every `step` then draws exactly `n` standard
//! normal deviates (the fixed-table Ziggurat of `rand_distr::StandardNormal`),
//! one per container in index order, whatever the action; the draw of an
//! emptied container is discarded. Stream alignment therefore never depends
//! on the actions taken.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::config::EnvConfig;
use crate::dynamics::{decay_timer, processing_time, step_volume, NoiseDraw};
use crate::reward::transition_reward;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvError {
    #[error("action {code} out of range 0..={max}")]
    InvalidAction { code: i64, max: usize },
    #[error("step called before reset")]
    NotReset,
    #[error("episode is over; call reset first")]
    EpisodeOver,
}

/// Container index is zero-based here. On the wire and in traces the action
/// is encoded as `0` for do-nothing and `i + 1` for emptying container `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    DoNothing,
    Empty(usize),
}

impl Action {
    pub fn from_code(code: i64, container_count: usize) -> Result<Self, EnvError> {
        match code {
            0 => Ok(Action::DoNothing),
            c if c >= 1 && (c as u64) <= container_count as u64 => {
                Ok(Action::Empty(c as usize - 1))
            }
            _ => Err(EnvError::InvalidAction {
                code,
                max: container_count,
            }),
        }
    }

    pub fn code(self) -> usize {
        match self {
            Action::DoNothing => 0,
            Action::Empty(i) => i + 1,
        }
    }

    pub fn is_emptying(self) -> bool {
        matches!(self, Action::Empty(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub volumes: Vec<f64>,
    /// Seconds until each PU is free; zero means available.
    pub timers: Vec<f64>,
    pub t: usize,
}

impl State {
    /// Lowest-index free PU.
    pub fn free_pu(&self) -> Option<usize> {
        self.timers.iter().position(|&p| p == 0.0)
    }

    pub fn observation(&self) -> Vec<f64> {
        observe(self)
    }
}

/// `[v_1, ..., v_n, p_1, ..., p_m]`.
pub fn observe(state: &State) -> Vec<f64> {
    state
        .volumes
        .iter()
        .chain(state.timers.iter())
        .copied()
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepInfo {
    /// Whether some PU was free when the action was taken.
    pub pu_available: bool,
    /// Volume sent to a PU, for a successful emptying.
    pub emptied_volume: Option<f64>,
    /// Zero-based index of the PU that received the job.
    pub pu_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Vec<f64>,
    pub reward: f64,
    /// A container reached `max_volume`.
    pub terminated: bool,
    /// The horizon was reached without overflow.
    pub truncated: bool,
    pub info: StepInfo,
}

impl StepResult {
    pub fn done(&self) -> bool {
        self.terminated || self.truncated
    }
}

/// Deterministic transition given one noise value per container (volume
/// units, already scaled to the per-step standard deviation).
pub fn transition(
    cfg: &EnvConfig,
    state: &State,
    action: Action,
    noise: &[f64],
) -> (State, StepResult) {
    let n = cfg.container_count();
    assert_eq!(noise.len(), n, "one noise draw per container");
    let delta = cfg.timestep_seconds;

    let free_pu = state.free_pu();
    let pu_available = free_pu.is_some();
    let job = match (action, free_pu) {
        (Action::Empty(i), Some(k)) => Some((i, k)),
        _ => None,
    };

    let volumes = cfg
        .containers
        .iter()
        .zip(&state.volumes)
        .zip(noise)
        .enumerate()
        .map(|(i, ((params, &v), &eps))| match job {
            Some((emptied, _)) if emptied == i => 0.0,
            _ => step_volume(v, params.drift_per_step(delta), NoiseDraw(eps)),
        })
        .collect::<Vec<_>>();

    let timers = state
        .timers
        .iter()
        .enumerate()
        .map(|(j, &p)| match job {
            Some((i, k)) if k == j => processing_time(state.volumes[i], &cfg.containers[i]),
            _ => decay_timer(p, delta),
        })
        .collect::<Vec<_>>();

    let emptied_volume = job.map(|(i, _)| state.volumes[i]);
    let reward = transition_reward(cfg, action, &volumes, pu_available, emptied_volume);
    let terminated = volumes.iter().any(|&v| v >= cfg.max_volume);
    let t = state.t + 1;
    let truncated = !terminated && t >= cfg.max_episode_steps;

    let next = State { volumes, timers, t };
    let result = StepResult {
        observation: observe(&next),
        reward,
        terminated,
        truncated,
        info: StepInfo {
            pu_available,
            emptied_volume,
            pu_index: job.map(|(_, k)| k),
        },
    };
    (next, result)
}

/// Seeded random stream of one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl EnvRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    NotReset,
    Running,
    Over,
}

/// One environment instance. Single-threaded; independent instances may run
/// on separate threads.
#[derive(Debug, Clone)]
pub struct Env {
    cfg: EnvConfig,
    state: State,
    rng: EnvRng,
    phase: Phase,
    noise_std: Vec<f64>,
    noise: Vec<f64>,
}

impl Env {
    /// The config must already be validated.
    pub fn new(cfg: EnvConfig) -> Self {
        let noise_std = cfg
            .containers
            .iter()
            .map(|c| c.noise_std_per_step(cfg.timestep_seconds))
            .collect();
        let state = State {
            volumes: vec![0.0; cfg.container_count()],
            timers: vec![0.0; cfg.pu_count],
            t: 0,
        };
        Self {
            noise: vec![0.0; cfg.container_count()],
            cfg,
            state,
            rng: EnvRng::new(0),
            phase: Phase::NotReset,
            noise_std,
        }
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn rng(&self) -> &EnvRng {
        &self.rng
    }

    pub fn is_over(&self) -> bool {
        self.phase == Phase::Over
    }

    /// Starts a new episode: uniform initial volumes, all PUs free.
    pub fn reset(&mut self, seed: u64) -> Vec<f64> {
        self.rng = EnvRng::new(seed);
        let [lo, hi] = self.cfg.initial_volume_range;
        for v in &mut self.state.volumes {
            *v = lo + (hi - lo) * self.rng.unit();
        }
        self.state.timers.iter_mut().for_each(|p| *p = 0.0);
        self.state.t = 0;
        self.phase = Phase::Running;
        self.state.observation()
    }

    pub fn step(&mut self, action: Action) -> Result<StepResult, EnvError> {
        match self.phase {
            Phase::NotReset => return Err(EnvError::NotReset),
            Phase::Over => return Err(EnvError::EpisodeOver),
            Phase::Running => {}
        }
        if let Action::Empty(i) = action {
            if i >= self.cfg.container_count() {
                return Err(EnvError::InvalidAction {
                    code: i as i64 + 1,
                    max: self.cfg.container_count(),
                });
            }
        }
        for (eps, &std) in self.noise.iter_mut().zip(&self.noise_std) {
            *eps = std * self.rng.standard_normal();
        }
        let (next, result) = transition(&self.cfg, &self.state, action, &self.noise);
        self.state = next;
        if result.done() {
            self.phase = Phase::Over;
        }
        Ok(result)
    }

    /// Same as [`Env::step`] with the wire encoding of the action.
    pub fn step_code(&mut self, code: i64) -> Result<StepResult, EnvError> {
        let action = Action::from_code(code, self.cfg.container_count())?;
        self.step(action)
    }
}
