//! Per-container ECDFs of the volumes at which the rule-based controller
//! emptied containers on the scarce-PU plant (5 containers, 2 PUs). Failed
//! attempts (no free PU) are excluded from the volume population but counted
//! separately.
//!
//! cargo run --example emptying_volume_ecdf

use container_sim::config::default_config;
use container_sim::policies::PolicyKind;
use container_sim::rollout::{consecutive_seeds, ecdf, emptying_events, run_episodes, EventFilter};

fn main() {
    let cfg = default_config(5, 2, 120.0)
        .unwrap()
        .with_max_episode_steps(600);
    let trajs = run_episodes(
        &cfg,
        PolicyKind::RuleBased { threshold: 1.0 },
        &consecutive_seeds(1, 15),
        1,
    )
    .unwrap();

    for (i, c) in cfg.containers.iter().enumerate() {
        let attempts = emptying_events(
            &trajs,
            EventFilter {
                container: Some(i),
                successful_only: false,
            },
        );
        let volumes: Vec<f64> = attempts
            .iter()
            .filter(|e| e.successful())
            .map(|e| e.volume)
            .collect();
        print!(
            "{:>6}: {} attempts, {} successful",
            c.name,
            attempts.len(),
            volumes.len()
        );
        match ecdf(&volumes) {
            Ok(f) => println!(
                ", F(34.5) = {:.3}, F(35.5) = {:.3}",
                f.eval(34.5),
                f.eval(35.5)
            ),
            Err(_) => println!(),
        }
    }
}
