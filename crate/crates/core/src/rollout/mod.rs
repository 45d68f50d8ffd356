//! Episode runner, trajectory records and the analysis built on them.

mod stats;
mod trace;

use rayon::prelude::*;

use crate::config::EnvConfig;
use crate::env::{Action, Env, EnvError};
use crate::policies::{Policy, PolicyKind};

pub use stats::{ecdf, summarize, Ecdf, EpisodeStats, StatsError, Summary};
pub use trace::{
    export_trace, format_number, import_trace, read_trace, trace_header, write_trace, TraceError,
    TraceMeta,
};

/// One transition: the state the action was taken in, the action and its
/// outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: usize,
    pub volumes: Vec<f64>,
    pub timers: Vec<f64>,
    pub action: Action,
    pub reward: f64,
    pub terminated: bool,
    pub truncated: bool,
    pub pu_available: bool,
    pub emptied_volume: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub seed: u64,
    pub config_fingerprint: String,
    pub records: Vec<StepRecord>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Undiscounted return.
    pub fn cumulative_reward(&self) -> f64 {
        self.records.iter().map(|r| r.reward).sum()
    }

    pub fn overflowed(&self) -> bool {
        self.records.last().is_some_and(|r| r.terminated)
    }

    pub fn container_count(&self) -> usize {
        self.records.first().map_or(0, |r| r.volumes.len())
    }
}

/// Runs one episode from `reset(seed)` until termination or truncation.
pub fn run_episode(
    cfg: &EnvConfig,
    policy: &mut dyn Policy,
    seed: u64,
) -> Result<Trajectory, EnvError> {
    let mut env = Env::new(cfg.clone());
    env.reset(seed);
    let mut records = Vec::with_capacity(cfg.max_episode_steps);
    loop {
        let state = env.state().clone();
        let action = policy.act(&state, cfg);
        let result = env.step(action)?;
        let done = result.done();
        records.push(StepRecord {
            t: state.t,
            volumes: state.volumes,
            timers: state.timers,
            action,
            reward: result.reward,
            terminated: result.terminated,
            truncated: result.truncated,
            pu_available: result.info.pu_available,
            emptied_volume: result.info.emptied_volume,
        });
        if done {
            break;
        }
    }
    Ok(Trajectory {
        seed,
        config_fingerprint: cfg.fingerprint(),
        records,
    })
}

/// Runs one episode per seed on `jobs` worker threads. The output is in seed
/// order and does not depend on `jobs`.
pub fn run_episodes(
    cfg: &EnvConfig,
    policy: PolicyKind,
    seeds: &[u64],
    jobs: usize,
) -> Result<Vec<Trajectory>, EnvError> {
    let run = |&seed: &u64| run_episode(cfg, policy.build(seed).as_mut(), seed);
    if jobs <= 1 {
        return seeds.iter().map(run).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    pool.install(|| seeds.par_iter().map(run).collect())
}

/// `seed, seed + 1, ...`
pub fn consecutive_seeds(first: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|k| first.wrapping_add(k)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmptyingEvent {
    /// Zero-based container index.
    pub container: usize,
    pub t: usize,
    pub volume: f64,
    pub reward: f64,
    pub pu_available: bool,
}

impl EmptyingEvent {
    /// A PU took the job and there was material to process.
    pub fn successful(&self) -> bool {
        self.pu_available && self.volume > 0.0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EventFilter {
    pub container: Option<usize>,
    pub successful_only: bool,
}

/// Every emptying attempt in `trajs`, in trajectory then time order.
///
/// Unfiltered, these are the per-action reward population (penalized
/// attempts included); with `successful_only` they are the emptying volume
/// population.
pub fn emptying_events(trajs: &[Trajectory], filter: EventFilter) -> Vec<EmptyingEvent> {
    trajs
        .iter()
        .flat_map(|traj| traj.records.iter())
        .filter_map(|rec| match rec.action {
            Action::Empty(container) => Some(EmptyingEvent {
                container,
                t: rec.t,
                volume: rec.volumes[container],
                reward: rec.reward,
                pu_available: rec.pu_available,
            }),
            Action::DoNothing => None,
        })
        .filter(|e| filter.container.is_none_or(|c| c == e.container))
        .filter(|e| !filter.successful_only || e.successful())
        .collect()
}
