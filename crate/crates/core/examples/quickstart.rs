//! Reset an environment, drive it with random actions and print each
//! non-trivial transition.
//!
//! cargo run --example quickstart

use container_sim::config::default_config;
use container_sim::env::Env;
use container_sim::policies::uniform_random_action;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let cfg = default_config(5, 2, 120.0)
        .unwrap()
        .with_max_episode_steps(600);
    let n = cfg.container_count();
    let mut env = Env::new(cfg);
    let mut agent_rng = ChaCha8Rng::seed_from_u64(2024);

    let obs = env.reset(7);
    println!("initial observation: {obs:.2?}");

    let mut total = 0.0;
    loop {
        let action = uniform_random_action(&mut agent_rng, n);
        let step = env.step(action).expect("episode is running");
        total += step.reward;
        if step.reward != 0.0 && step.reward != -0.1 {
            println!(
                "t={:>3} action={} reward={:+.3} volumes={:.1?}",
                env.state().t,
                action.code(),
                step.reward,
                &step.observation[..n]
            );
        }
        if step.done() {
            let why = if step.terminated {
                "overflow"
            } else {
                "horizon"
            };
            println!(
                "episode over after {} steps ({why}), return {total:.3}",
                env.state().t
            );
            break;
        }
    }
}
