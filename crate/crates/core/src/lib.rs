//! Seeded simulator of a container-management plant: containers fill as
//! random walks with drift, a few processing units (PUs) take turns emptying
//! them, and each emptying is rewarded by how close its volume lies to the
//! container's optimal volumes.
//!
//! The crate provides the environment itself ([`env`]), its building blocks
//! ([`dynamics`], [`reward`], [`config`]), baseline controllers
//! ([`policies`]), rollout and analysis tools ([`rollout`]), a JSON-lines
//! server for external agents ([`protocol`]) and the command-line front end
//! ([`cli`]).
//!
//! ```
//! use container_sim::config::default_config;
//! use container_sim::env::{Action, Env};
//!
//! let mut env = Env::new(default_config(5, 2, 120.0).unwrap());
//! let obs = env.reset(7);
//! assert_eq!(obs.len(), 7);
//! let step = env.step(Action::DoNothing).unwrap();
//! assert!(step.reward <= 0.0);
//! ```

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod env;
pub mod policies;
pub mod protocol;
pub mod reward;
pub mod rollout;

pub use config::{load_config, ContainerParams, EnvConfig, Optimum};
pub use env::{Action, Env, EnvError, State, StepResult};
pub use policies::{Policy, PolicyKind};
pub use rollout::{run_episode, run_episodes, Trajectory};
