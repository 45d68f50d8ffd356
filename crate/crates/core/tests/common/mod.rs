#![allow(dead_code, clippy::needless_range_loop)]

use std::path::{Path, PathBuf};

use container_sim::config::{load_config_file, EnvConfig};

pub fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

/// Every shipped config with its file name.
pub fn shipped_configs() -> Vec<(String, EnvConfig)> {
    let mut out: Vec<(String, EnvConfig)> = std::fs::read_dir(configs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, load_config_file(&p).unwrap())
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_container-sim")
}

/// Result of the reference transition.
#[derive(Debug, Clone)]
pub struct Reference {
    pub volumes: Vec<f64>,
    pub timers: Vec<f64>,
    pub reward: f64,
    pub terminated: bool,
}

/// Straight-line transcription of the transition rules, written without
/// using any of the crate's dynamics or reward code. `z` holds one standard
/// normal deviate per container; `action` is the wire code (0 = do nothing).
pub fn reference_step(
    cfg: &EnvConfig,
    volumes: &[f64],
    timers: &[f64],
    action: usize,
    z: &[f64],
) -> Reference {
    let n = cfg.containers.len();
    let m = cfg.pu_count;
    let delta = cfg.timestep_seconds;

    let mut free = None;
    for j in 0..m {
        if timers[j] == 0.0 {
            free = Some(j);
            break;
        }
    }
    let target = if action == 0 { None } else { Some(action - 1) };
    let emptying = target.is_some() && free.is_some();

    let mut next_v = vec![0.0; n];
    for i in 0..n {
        if emptying && target == Some(i) {
            next_v[i] = 0.0;
        } else {
            let c = &cfg.containers[i];
            let alpha = c.fill_rate * delta;
            let sigma = c.noise_std_per_sec * delta.sqrt();
            let x = alpha + volumes[i] + sigma * z[i];
            next_v[i] = if x > 0.0 { x } else { 0.0 };
        }
    }

    let mut next_p = vec![0.0; m];
    for j in 0..m {
        if emptying && free == Some(j) {
            let c = &cfg.containers[target.unwrap()];
            let products = (volumes[target.unwrap()] / c.product_size).floor();
            next_p[j] = c.actuation_time + c.time_per_product * products;
        } else {
            let x = timers[j] - delta;
            next_p[j] = if x > 0.0 { x } else { 0.0 };
        }
    }

    let mut overflow = false;
    for &v in &next_v {
        if v >= cfg.max_volume {
            overflow = true;
        }
    }
    let reward = if overflow {
        cfg.reward_min
    } else if target.is_none() {
        0.0
    } else if free.is_none() || volumes[target.unwrap()] == 0.0 {
        cfg.reward_penalty
    } else {
        let c = &cfg.containers[target.unwrap()];
        let v = volumes[target.unwrap()];
        let mut r = cfg.reward_penalty;
        for opt in &c.optima {
            let d = v - opt.volume;
            r += (opt.height - cfg.reward_penalty)
                * (-(d * d) / (2.0 * opt.width * opt.width)).exp();
        }
        r
    };

    Reference {
        volumes: next_v,
        timers: next_p,
        reward,
        terminated: overflow,
    }
}

/// Largest componentwise absolute difference.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
