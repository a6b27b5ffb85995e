//! Build timing and the two growth fits: linear in `N`, `c·2^T` in `T`.

use std::time::{Duration, Instant};

use crate::afr::{build_afr_with, AfrError, BuildOptions};
use crate::gen::random_fleet;

/// One timed build.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub n: usize,
    pub horizon: usize,
    pub rows: usize,
    /// Fastest of the repetitions.
    pub time: Duration,
}

impl Measurement {
    pub fn per_direction(&self) -> Duration {
        self.time / (self.rows / 2).max(1) as u32
    }
}

/// Times `build_afr` on a seeded random fleet, single-threaded, minimum over `reps` runs.
pub fn time_build(n: usize, horizon: usize, seed: u64, reps: usize) -> Result<Measurement, AfrError> {
    let rs = random_fleet(seed, n, horizon);
    let opts = BuildOptions { threads: Some(1), contributions: false };
    let mut best = Duration::MAX;
    let mut rows = 0;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let model = build_afr_with(&rs, &opts)?;
        best = best.min(start.elapsed());
        rows = model.inequality_count();
    }
    Ok(Measurement { n, horizon, rows, time: best })
}

/// Least-squares line `y = a + b·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Fit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Fit { intercept, slope, r_squared }
}

/// Fit of `log2 y = log2 c + T`: the slope is pinned to one, only `c` is free.
/// R² is taken on the log scale.
pub fn exp2_fit(horizons: &[usize], ys: &[f64]) -> Fit {
    let logs: Vec<f64> = ys.iter().map(|y| y.log2()).collect();
    let ts: Vec<f64> = horizons.iter().map(|&t| t as f64).collect();
    let n = logs.len() as f64;
    let intercept = logs.iter().zip(&ts).map(|(l, t)| l - t).sum::<f64>() / n;
    let ml = logs.iter().sum::<f64>() / n;
    let sse: f64 = logs.iter().zip(&ts).map(|(l, t)| (l - intercept - t).powi(2)).sum();
    let syy: f64 = logs.iter().map(|l| (l - ml).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Fit { intercept, slope: 1.0, r_squared }
}
