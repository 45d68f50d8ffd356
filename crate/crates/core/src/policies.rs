//! Built-in baseline controllers.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::EnvConfig;
use crate::env::{Action, State};

/// Default distance to the ideal volume inside which the rule-based
/// controller empties.
pub const DEFAULT_THRESHOLD: f64 = 1.0;

/// ChaCha stream used by randomized policies, so that their draws never
/// overlap with the environment stream of the same seed.
const POLICY_STREAM: u64 = 1;

pub trait Policy {
    fn act(&mut self, state: &State, cfg: &EnvConfig) -> Action;
}

/// Empties the lowest-index container whose volume is strictly closer than
/// `threshold` to its ideal optimum. PU timers are not inspected.
pub fn rule_based_action(state: &State, cfg: &EnvConfig, threshold: f64) -> Action {
    state
        .volumes
        .iter()
        .zip(&cfg.containers)
        .position(|(&v, c)| (v - c.ideal_volume()).abs() < threshold)
        .map_or(Action::DoNothing, Action::Empty)
}

/// Uniform over do-nothing and the `container_count` emptying actions.
pub fn uniform_random_action<R: Rng + ?Sized>(rng: &mut R, container_count: usize) -> Action {
    match rng.random_range(0..=container_count) {
        0 => Action::DoNothing,
        code => Action::Empty(code - 1),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleBased {
    pub threshold: f64,
}

impl Policy for RuleBased {
    fn act(&mut self, state: &State, cfg: &EnvConfig) -> Action {
        rule_based_action(state, cfg, self.threshold)
    }
}

#[derive(Debug, Clone)]
pub struct UniformRandom {
    rng: ChaCha8Rng,
}

impl UniformRandom {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(POLICY_STREAM);
        Self { rng }
    }
}

impl Policy for UniformRandom {
    fn act(&mut self, _state: &State, cfg: &EnvConfig) -> Action {
        uniform_random_action(&mut self.rng, cfg.container_count())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DoNothing;

impl Policy for DoNothing {
    fn act(&mut self, _state: &State, _cfg: &EnvConfig) -> Action {
        Action::DoNothing
    }
}

/// Replays a fixed list of actions, then does nothing.
#[derive(Debug, Clone)]
pub struct Scripted {
    actions: Vec<Action>,
    next: usize,
}

impl Scripted {
    pub fn new(actions: Vec<Action>) -> Self {
        Self { actions, next: 0 }
    }
}

impl Policy for Scripted {
    fn act(&mut self, _state: &State, _cfg: &EnvConfig) -> Action {
        let a = self
            .actions
            .get(self.next)
            .copied()
            .unwrap_or(Action::DoNothing);
        self.next += 1;
        a
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicyKind {
    RuleBased { threshold: f64 },
    UniformRandom,
    DoNothing,
}

impl PolicyKind {
    /// Fresh policy instance for the episode with the given seed.
    pub fn build(self, seed: u64) -> Box<dyn Policy + Send> {
        match self {
            PolicyKind::RuleBased { threshold } => Box::new(RuleBased { threshold }),
            PolicyKind::UniformRandom => Box::new(UniformRandom::new(seed)),
            PolicyKind::DoNothing => Box::new(DoNothing),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::RuleBased { .. } => "rule-based",
            PolicyKind::UniformRandom => "random",
            PolicyKind::DoNothing => "do-nothing",
        }
    }

    pub fn with_threshold(self, threshold: f64) -> Result<Self, String> {
        if !(threshold > 0.0 && threshold.is_finite()) {
            return Err(format!("threshold must be positive, got {threshold}"));
        }
        Ok(match self {
            PolicyKind::RuleBased { .. } => PolicyKind::RuleBased { threshold },
            other => other,
        })
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rule-based" => Ok(PolicyKind::RuleBased {
                threshold: DEFAULT_THRESHOLD,
            }),
            "random" => Ok(PolicyKind::UniformRandom),
            "do-nothing" => Ok(PolicyKind::DoNothing),
            other => Err(format!(
                "unknown policy `{other}` (expected rule-based, random or do-nothing)"
            )),
        }
    }
}
