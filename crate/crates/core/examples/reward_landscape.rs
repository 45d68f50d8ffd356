//! Tabulates the emptying reward of a synthetic container over `[0, 40)` and
//! runs the landscape check on every shipped grid config.
//!
//! cargo run --example reward_landscape

use container_sim::config::{default_config, grid_points, validate_reward_landscape};
use container_sim::reward::emptying_reward;

fn main() {
    let cfg = default_config(5, 2, 60.0).unwrap();
    let container = &cfg.containers[1];
    println!("# {} optima {:?}", container.name, container.optima);
    println!("volume,reward");
    for k in 1..80 {
        let v = k as f64 * 0.5;
        println!(
            "{v},{:.6}",
            emptying_reward(v, container, cfg.reward_penalty)
        );
    }

    for (n, m, delta) in grid_points() {
        let cfg = default_config(n, m, delta).unwrap();
        let warnings = validate_reward_landscape(&cfg, 0.01);
        eprintln!("synthetic-{n}-{m}-{delta}: {} warning(s)", warnings.len());
    }
}
