use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::TrialOutcome;

/// Summary of one player's latency over a batch of trials.
///
/// Censored trials enter every statistic at the slot cap, so when
/// `censored_count > 0` the mean and the upper quantiles are lower bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub trials: u64,
    pub focus_player: usize,
    pub slot_cap: u64,
    pub mean: f64,
    pub mean_is_lower_bound: bool,
    pub std_dev: f64,
    pub std_error: f64,
    pub ci95_halfwidth: f64,
    pub median: f64,
    pub q90: f64,
    pub q99: f64,
    pub max: u64,
    pub censored_count: u64,
}

/// Nearest-rank quantile of sorted data.
fn quantile(sorted: &[u64], q: f64) -> f64 {
    let n = sorted.len();
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1] as f64
}

impl LatencyStats {
    /// Aggregates the focus player's latencies. All sums are exact integer
    /// sums, so the result does not depend on the order of the outcomes.
    pub fn from_outcomes(outcomes: &[TrialOutcome], focus_player: usize, slot_cap: u64) -> LatencyStats {
        let mut values: Vec<u64> = outcomes
            .iter()
            .map(|o| o.latency[focus_player].unwrap_or(slot_cap))
            .collect();
        let censored_count = outcomes.iter().filter(|o| o.censored[focus_player]).count() as u64;
        LatencyStats::from_values(&mut values, focus_player, slot_cap, censored_count)
    }

    fn from_values(values: &mut [u64], focus_player: usize, slot_cap: u64, censored_count: u64) -> LatencyStats {
        let n = values.len() as u128;
        assert!(n > 0, "statistics need at least one trial");
        let sum: u128 = values.iter().map(|&v| v as u128).sum();
        let sum_sq: u128 = values.iter().map(|&v| (v as u128) * (v as u128)).sum();
        let mean = sum as f64 / n as f64;
        let variance = if n > 1 {
            // n * sum_sq - sum^2 >= 0 exactly
            let num = n * sum_sq - sum * sum;
            num as f64 / (n * (n - 1)) as f64
        } else {
            0.0
        };
        let std_dev = variance.sqrt();
        let std_error = std_dev / (n as f64).sqrt();
        values.sort_unstable();
        LatencyStats {
            trials: n as u64,
            focus_player,
            slot_cap,
            mean,
            mean_is_lower_bound: censored_count > 0,
            std_dev,
            std_error,
            ci95_halfwidth: 1.96 * std_error,
            median: quantile(values, 0.5),
            q90: quantile(values, 0.9),
            q99: quantile(values, 0.99),
            max: *values.last().expect("non-empty"),
            censored_count,
        }
    }

    pub fn censored_fraction(&self) -> f64 {
        self.censored_count as f64 / self.trials as f64
    }
}

/// Empirical latency pmf of one player; censored trials are reported as a
/// separate mass rather than assigned a latency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalPmf {
    pub trials: u64,
    pub focus_player: usize,
    pub counts: BTreeMap<u64, u64>,
    pub censored_count: u64,
}

impl EmpiricalPmf {
    pub fn from_outcomes(outcomes: &[TrialOutcome], focus_player: usize) -> EmpiricalPmf {
        let mut counts = BTreeMap::new();
        let mut censored_count = 0;
        for o in outcomes {
            match o.latency[focus_player] {
                Some(t) => *counts.entry(t).or_insert(0u64) += 1,
                None => censored_count += 1,
            }
        }
        EmpiricalPmf {
            trials: outcomes.len() as u64,
            focus_player,
            counts,
            censored_count,
        }
    }

    pub fn frequency(&self, latency: u64) -> f64 {
        self.counts.get(&latency).copied().unwrap_or(0) as f64 / self.trials as f64
    }

    pub fn censored_fraction(&self) -> f64 {
        self.censored_count as f64 / self.trials as f64
    }

    /// `latency -> frequency` map.
    pub fn pmf(&self) -> BTreeMap<u64, f64> {
        self.counts
            .iter()
            .map(|(&t, &c)| (t, c as f64 / self.trials as f64))
            .collect()
    }

    /// Total-variation distance to a reference pmf restricted to `support`:
    /// half the summed absolute differences over those points.
    pub fn tv_distance_on(&self, support: &[u64], reference: &[f64]) -> f64 {
        support
            .iter()
            .zip(reference)
            .map(|(&t, &q)| (self.frequency(t) - q).abs())
            .sum::<f64>()
            / 2.0
    }
}
