use thiserror::Error;

use super::Trajectory;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("no samples")]
    Empty,
    #[error("sample {index} is NaN")]
    NaN { index: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeStats {
    pub seed: u64,
    pub cumulative_reward: f64,
    pub steps: usize,
    pub overflow: bool,
    /// Share of steps with an emptying action.
    pub emptying_fraction: f64,
}

impl EpisodeStats {
    pub fn of(traj: &Trajectory) -> Self {
        let steps = traj.len();
        let emptying = traj
            .records
            .iter()
            .filter(|r| r.action.is_emptying())
            .count();
        Self {
            seed: traj.seed,
            cumulative_reward: traj.cumulative_reward(),
            steps,
            overflow: traj.overflowed(),
            emptying_fraction: if steps == 0 {
                0.0
            } else {
                emptying as f64 / steps as f64
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator); 0 for one episode.
    pub std: f64,
    pub episodes: Vec<EpisodeStats>,
}

impl Summary {
    pub fn overflow_count(&self) -> usize {
        self.episodes.iter().filter(|e| e.overflow).count()
    }

    pub fn mean_emptying_fraction(&self) -> f64 {
        let total: f64 = self.episodes.iter().map(|e| e.emptying_fraction).sum();
        total / self.episodes.len() as f64
    }
}

pub fn summarize(trajs: &[Trajectory]) -> Result<Summary, StatsError> {
    if trajs.is_empty() {
        return Err(StatsError::Empty);
    }
    let episodes: Vec<EpisodeStats> = trajs.iter().map(EpisodeStats::of).collect();
    let (mean, std) = mean_std(episodes.iter().map(|e| e.cumulative_reward));
    Ok(Summary {
        mean,
        std,
        episodes,
    })
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Empirical CDF over the distinct sample values.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    values: Vec<f64>,
    /// Number of samples `<=` the matching entry of `values`.
    counts: Vec<usize>,
}

pub fn ecdf(samples: &[f64]) -> Result<Ecdf, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::Empty);
    }
    if let Some(index) = samples.iter().position(|x| x.is_nan()) {
        return Err(StatsError::NaN { index });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut values: Vec<f64> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for (i, x) in sorted.into_iter().enumerate() {
        // -0.0 and 0.0 are one value
        if values.last() == Some(&x) {
            *counts.last_mut().unwrap() = i + 1;
        } else {
            values.push(x);
            counts.push(i + 1);
        }
    }
    Ok(Ecdf { values, counts })
}

impl Ecdf {
    pub fn sample_count(&self) -> usize {
        *self.counts.last().unwrap()
    }

    /// `#{s <= x} / N`.
    pub fn eval(&self, x: f64) -> f64 {
        let idx = self.values.partition_point(|&v| v <= x);
        let below = if idx == 0 { 0 } else { self.counts[idx - 1] };
        below as f64 / self.sample_count() as f64
    }

    /// Share of samples in the closed interval `[lo, hi]`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        let upto = |pred: &dyn Fn(f64) -> bool| {
            let idx = self.values.partition_point(|&v| pred(v));
            if idx == 0 {
                0
            } else {
                self.counts[idx - 1]
            }
        };
        let inside = upto(&|v| v <= hi).saturating_sub(upto(&|v| v < lo));
        inside as f64 / self.sample_count() as f64
    }

    /// `(value, F(value))` for every distinct value, ascending.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.sample_count() as f64;
        self.values
            .iter()
            .zip(&self.counts)
            .map(move |(&v, &c)| (v, c as f64 / n))
    }
}
