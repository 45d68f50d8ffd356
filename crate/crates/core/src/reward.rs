//! Reward function.
//!
//! Case order for one transition:
//! 1. any container at or above `max_volume` afterwards: `reward_min`;
//! 2. do nothing: `0`;
//! 3. emptying with no free PU, or an empty container: `reward_penalty`;
//! 4. otherwise the Gaussian emptying reward of the emptied volume.

use crate::config::{ContainerParams, EnvConfig};
use crate::env::Action;

/// `sum_k (h_k - r_pen) * exp(-(v - v*_k)^2 / (2 w_k^2))`, the part of the
/// emptying reward above the penalty. Strictly positive for finite `volume`
/// as long as the exponentials do not underflow.
pub fn emptying_reward_excess(volume: f64, params: &ContainerParams, reward_penalty: f64) -> f64 {
    params
        .optima
        .iter()
        .map(|opt| {
            let d = volume - opt.volume;
            (opt.height - reward_penalty) * (-(d * d) / (2.0 * opt.width * opt.width)).exp()
        })
        .sum()
}

/// Sum of Gaussian bells over the container's optima, offset by the penalty.
/// Callers handle the zero-volume case.
pub fn emptying_reward(volume: f64, params: &ContainerParams, reward_penalty: f64) -> f64 {
    reward_penalty + emptying_reward_excess(volume, params, reward_penalty)
}

/// Reward of one transition. `next_volumes` are the post-transition volumes;
/// `emptied_volume` is the pre-emptying volume handed to a PU, if any.
pub fn transition_reward(
    cfg: &EnvConfig,
    action: Action,
    next_volumes: &[f64],
    pu_available: bool,
    emptied_volume: Option<f64>,
) -> f64 {
    if next_volumes.iter().any(|&v| v >= cfg.max_volume) {
        return cfg.reward_min;
    }
    let Action::Empty(container) = action else {
        return 0.0;
    };
    match emptied_volume {
        Some(v) if pu_available && v > 0.0 => {
            emptying_reward(v, &cfg.containers[container], cfg.reward_penalty)
        }
        _ => cfg.reward_penalty,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{default_config, Optimum};
    use proptest::prelude::*;

    fn single_peak() -> EnvConfig {
        let mut cfg = default_config(5, 2, 60.0).unwrap();
        for c in &mut cfg.containers {
            c.optima = vec![Optimum {
                volume: 35.0,
                height: 1.0,
                width: 2.0,
            }];
        }
        cfg
    }

    #[test]
    fn peak_centre_is_exactly_one() {
        let cfg = single_peak();
        assert_eq!(emptying_reward(35.0, &cfg.containers[0], -0.1), 1.0);
    }

    #[test]
    fn one_width_off_centre() {
        let cfg = single_peak();
        // -0.1 + 1.1 * exp(-0.5)
        let expected = -0.1 + 1.1 * 0.606_530_659_712_633_4;
        let got = emptying_reward(37.0, &cfg.containers[0], -0.1);
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.56718).abs() < 1e-5);
    }

    #[test]
    fn far_from_peak_is_penalty_level() {
        let cfg = single_peak();
        let excess = emptying_reward_excess(5.0, &cfg.containers[0], -0.1);
        assert!(excess > 0.0 && excess < 1e-48);
        assert!((emptying_reward(5.0, &cfg.containers[0], -0.1) + 0.1).abs() < 1e-15);
    }

    #[test]
    fn case_analysis() {
        let cfg = single_peak();
        let calm = [10.0, 10.0, 10.0, 10.0, 10.0];
        assert_eq!(
            transition_reward(&cfg, Action::DoNothing, &calm, true, None),
            0.0
        );
        assert_eq!(
            transition_reward(&cfg, Action::Empty(2), &calm, false, None),
            -0.1
        );
        assert_eq!(
            transition_reward(&cfg, Action::Empty(2), &calm, true, Some(0.0)),
            -0.1
        );
        assert_eq!(
            transition_reward(&cfg, Action::Empty(2), &calm, true, Some(35.0)),
            1.0
        );

        let overflow = [10.0, 41.0, 10.0, 10.0, 10.0];
        assert_eq!(
            transition_reward(&cfg, Action::DoNothing, &overflow, true, None),
            -1.0
        );
        // overflow dominates a successful emptying elsewhere
        assert_eq!(
            transition_reward(&cfg, Action::Empty(0), &overflow, true, Some(35.0)),
            -1.0
        );
        // weak inequality
        let at_cap = [40.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(
            transition_reward(&cfg, Action::DoNothing, &at_cap, true, None),
            -1.0
        );
    }

    proptest! {
        #[test]
        fn single_peak_is_symmetric(d in 0.0..20.0f64) {
            let cfg = single_peak();
            let c = &cfg.containers[0];
            // 35 +/- d rounds independently, so compare at a few ulps of 35
            let up = emptying_reward(35.0 + d, c, -0.1);
            let down = emptying_reward(35.0 - d, c, -0.1);
            prop_assert!((up - down).abs() < 1e-13, "{} vs {}", up, down);
        }
    }
}
