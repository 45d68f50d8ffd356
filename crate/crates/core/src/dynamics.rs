//! Pure transition primitives: volume random walk, PU processing time and
//! timer decay. Noise is drawn by the caller.

use crate::config::ContainerParams;

/// One sample of the per-step inflow noise, in volume units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseDraw(pub f64);

/// Random walk with drift, clamped below at zero. There is no upper clamp;
/// overflow detection belongs to the environment.
pub fn step_volume(volume: f64, drift_per_step: f64, noise: NoiseDraw) -> f64 {
    (drift_per_step + volume + noise.0).max(0.0)
}

/// Seconds a PU is busy after receiving `volume` from this container:
/// actuation time plus one `time_per_product` per whole product.
pub fn processing_time(volume: f64, params: &ContainerParams) -> f64 {
    // Exact floor: values a hair below a multiple are not rounded up.
    let products = (volume / params.product_size).floor();
    params.actuation_time + params.time_per_product * products
}

pub fn decay_timer(remaining: f64, timestep_seconds: f64) -> f64 {
    (remaining - timestep_seconds).max(0.0)
}
