use std::f64::consts::PI;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::sim::{derive_seed, rng_from_seed};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviationEvent {
    /// `mean_i |x_i| − δ√(2/π) ≤ tδ√((π−2)/(πn))`, bound `t²/(1+t²)`.
    MeanAbs,
    /// `max_i |x_i| < δ√(2/π) + tδ√((π−2)/π)`, bound `(t²/(1+t²))^n` from independence.
    MaxAbs,
    /// `max_i |x_i| < δ√(2/π) + tδ√((π−2)/(πn))` against `(t²/(1+t²))^n`. The `1/√n` shrinks
    /// the per-variable threshold, so this bound is not implied by Cantelli for `n > 1`;
    /// reported for reference and not gated.
    MaxAbsScaled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CantelliCheck {
    pub event: DeviationEvent,
    pub t: f64,
    /// Variables per trial.
    pub n: usize,
    pub trials: usize,
    pub frequency: f64,
    pub bound: f64,
    /// Binomial standard error of the frequency.
    pub std_error: f64,
    /// `frequency ≥ bound − 3·std_error`.
    pub holds: bool,
    pub gated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthPoint {
    pub n: usize,
    pub trials: usize,
    pub median_max_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub delta: f64,
    pub n_samples: usize,
    pub mean_abs: f64,
    /// `δ√(2/π)`.
    pub expected_mean_abs: f64,
    pub cantelli: Vec<CantelliCheck>,
    pub growth: Vec<GrowthPoint>,
    pub growth_increasing: bool,
}

impl MonteCarloReport {
    pub fn cantelli_holds(&self) -> bool {
        self.cantelli.iter().filter(|c| c.gated).all(|c| c.holds)
    }
}

pub const CANTELLI_TS: [f64; 3] = [0.5, 1.0, 2.0];
pub const CANTELLI_NS: [usize; 3] = [1, 4, 16];
pub const GROWTH_NS: [usize; 4] = [10, 100, 1000, 10_000];
pub const GROWTH_TRIALS: usize = 101;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Monte Carlo checks of the half-normal mean, the one-sided Chebyshev (Cantelli) deviation
/// bounds on `|N(0, δ²)|`, and the growth of the largest of `n` absolute draws.
pub fn monte_carlo_lemmas(delta: f64, n_samples: usize, seed: u64) -> Result<MonteCarloReport> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("δ must be positive, got {delta}")));
    }
    if n_samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let normal = Normal::new(0.0, delta).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = rng_from_seed(derive_seed(seed, &[0]));
    let draws: Vec<f64> = (0..n_samples).map(|_| normal.sample(&mut rng).abs()).collect();
    let mean_abs = draws.iter().sum::<f64>() / n_samples as f64;
    let half_normal_mean = delta * (2.0 / PI).sqrt();
    let half_normal_sd = delta * ((PI - 2.0) / PI).sqrt();

    let mut cantelli = Vec::new();
    for &n in &CANTELLI_NS {
        let trials = n_samples / n;
        if trials == 0 {
            continue;
        }
        let groups: Vec<&[f64]> = draws.chunks_exact(n).collect();
        for &t in &CANTELLI_TS {
            let p1 = t * t / (1.0 + t * t);
            let events = [
                (DeviationEvent::MeanAbs, p1, true),
                (DeviationEvent::MaxAbs, p1.powi(n as i32), true),
                (DeviationEvent::MaxAbsScaled, p1.powi(n as i32), n == 1),
            ];
            for (event, bound, gated) in events {
                let hits = groups
                    .iter()
                    .filter(|g| match event {
                        DeviationEvent::MeanAbs => {
                            g.iter().sum::<f64>() / n as f64 - half_normal_mean <= t * half_normal_sd / (n as f64).sqrt()
                        }
                        DeviationEvent::MaxAbs => g.iter().all(|&x| x < half_normal_mean + t * half_normal_sd),
                        DeviationEvent::MaxAbsScaled => {
                            g.iter().all(|&x| x < half_normal_mean + t * half_normal_sd / (n as f64).sqrt())
                        }
                    })
                    .count();
                let frequency = hits as f64 / trials as f64;
                let std_error = (frequency * (1.0 - frequency) / trials as f64).sqrt();
                cantelli.push(CantelliCheck {
                    event,
                    t,
                    n,
                    trials,
                    frequency,
                    bound,
                    std_error,
                    holds: frequency >= bound - 3.0 * std_error,
                    gated,
                });
            }
        }
    }

    let growth: Vec<GrowthPoint> = GROWTH_NS
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            let mut rng = rng_from_seed(derive_seed(seed, &[1, j as u64]));
            let maxima = (0..GROWTH_TRIALS)
                .map(|_| (0..n).map(|_| normal.sample(&mut rng).abs()).fold(0.0, f64::max))
                .collect();
            GrowthPoint { n, trials: GROWTH_TRIALS, median_max_abs: median(maxima) }
        })
        .collect();
    let growth_increasing = growth.windows(2).all(|w| w[1].median_max_abs > w[0].median_max_abs);

    Ok(MonteCarloReport {
        delta,
        n_samples,
        mean_abs,
        expected_mean_abs: half_normal_mean,
        cantelli,
        growth,
        growth_increasing,
    })
}
