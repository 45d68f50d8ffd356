//! Loads a hand-written config, reports validation errors and landscape
//! warnings, then fixes it.
//!
//! cargo run --example custom_config

use container_sim::config::{load_config, timestep_warnings, validate_reward_landscape};

const DOC: &str = r#"{
  "containers": [
    {
      "name": "press-feed",
      "fill_rate": 0.006,
      "noise_std_per_sec": 0.02,
      "product_size": 4.0,
      "actuation_time": 90.0,
      "time_per_product": 30.0,
      "optima": [
        { "volume": 32.0, "height": 1.0, "width": 1.2 },
        { "volume": 17.0, "height": 0.6, "width": 1.2 }
      ]
    }
  ],
  "pu_count": 1,
  "max_volume": 40.0,
  "timestep_seconds": 60.0,
  "max_episode_steps": 1000,
  "reward_min": -1.0,
  "reward_penalty": -0.1,
  "initial_volume_range": [0.0, 20.0]
}"#;

fn main() {
    match load_config(DOC) {
        Ok(_) => println!("first draft loaded"),
        Err(e) => println!("first draft rejected: {e}"),
    }

    let fixed = DOC.replace("\"volume\": 17.0", "\"volume\": 16.0");
    let cfg = load_config(&fixed).expect("fixed config is valid");
    let mut warnings = validate_reward_landscape(&cfg, 0.01);
    warnings.extend(timestep_warnings(&cfg));
    println!(
        "fixed config {} loaded, {} warning(s)",
        cfg.fingerprint(),
        warnings.len()
    );
    for w in warnings {
        println!("  {w}");
    }
}
