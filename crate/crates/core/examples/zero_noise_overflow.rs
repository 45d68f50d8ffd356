//! A noiseless container drifting one volume unit per step from 30 overflows
//! at the tenth step under the do-nothing policy.
//!
//! cargo run --example zero_noise_overflow

use container_sim::config::default_config;
use container_sim::policies::DoNothing;
use container_sim::rollout::run_episode;

fn main() {
    let mut cfg = default_config(5, 2, 60.0).unwrap();
    cfg.containers.truncate(1);
    cfg.pu_count = 1;
    cfg.initial_volume_range = [30.0, 30.0];
    cfg.containers[0].noise_std_per_sec = 0.0;
    cfg.containers[0].fill_rate = 1.0 / cfg.timestep_seconds;

    let traj = run_episode(&cfg, &mut DoNothing, 0).unwrap();
    for rec in &traj.records {
        println!(
            "t={:>2} v={:>5.2} reward={:+}",
            rec.t, rec.volumes[0], rec.reward
        );
    }
    let last = traj.records.last().unwrap();
    println!(
        "terminated={} after {} steps, return {}",
        last.terminated,
        traj.len(),
        traj.cumulative_reward()
    );
}
