//! Emptying 35 volume units keeps a PU busy for 400 s; at a 120 s timestep
//! it reports busy for three further steps and is free on the fourth.
//!
//! cargo run --example pu_timing

use container_sim::config::default_config;
use container_sim::dynamics::processing_time;
use container_sim::env::{transition, Action, State};

fn main() {
    let mut cfg = default_config(5, 2, 120.0).unwrap();
    cfg.containers.truncate(1);
    cfg.pu_count = 1;
    cfg.containers[0].noise_std_per_sec = 0.0;
    let params = &cfg.containers[0];
    println!(
        "processing time for 35 units: {} s",
        processing_time(35.0, params)
    );

    let mut state = State {
        volumes: vec![35.0],
        timers: vec![0.0],
        t: 0,
    };
    let (next, step) = transition(&cfg, &state, Action::Empty(0), &[0.0]);
    println!("emptied: reward {} timer {:?}", step.reward, next.timers);
    state = next;
    for _ in 0..5 {
        let (next, step) = transition(&cfg, &state, Action::DoNothing, &[0.0]);
        state = next;
        println!(
            "t={} timer={:>5} pu free={}",
            state.t,
            state.timers[0],
            step.observation[1] == 0.0
        );
    }
}
