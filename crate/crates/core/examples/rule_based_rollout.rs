//! Fifteen rule-based episodes on the 5-container, 5-PU plant at the 600-step
//! evaluation horizon: summary statistics and the per-action reward ECDF.
//!
//! cargo run --example rule_based_rollout

use container_sim::config::default_config;
use container_sim::policies::PolicyKind;
use container_sim::rollout::{
    consecutive_seeds, ecdf, emptying_events, run_episodes, summarize, EventFilter,
};

fn main() {
    let cfg = default_config(5, 5, 120.0)
        .unwrap()
        .with_max_episode_steps(600);
    let policy = PolicyKind::RuleBased { threshold: 1.0 };
    let trajs = run_episodes(&cfg, policy, &consecutive_seeds(1, 15), 4).unwrap();

    let summary = summarize(&trajs).unwrap();
    println!("cumulative reward {:.2} ± {:.2}", summary.mean, summary.std);
    for e in &summary.episodes {
        println!(
            "  seed {:>2}: return {:>6.2}, {} steps, overflow {}, emptying {:.1}%",
            e.seed,
            e.cumulative_reward,
            e.steps,
            e.overflow,
            100.0 * e.emptying_fraction
        );
    }

    let rewards: Vec<f64> = emptying_events(&trajs, EventFilter::default())
        .iter()
        .map(|e| e.reward)
        .collect();
    let f = ecdf(&rewards).unwrap();
    println!(
        "{} emptying actions, {:.1}% of them rewarded in [0.75, 1]",
        rewards.len(),
        100.0 * f.mass_between(0.75, 1.0)
    );
    for (value, fraction) in f.points().step_by(10) {
        println!("  F({value:.4}) = {fraction:.3}");
    }
}
