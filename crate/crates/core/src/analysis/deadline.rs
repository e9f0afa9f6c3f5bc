//! Lower bounds on the expected latency of a deadline deviator.
//!
//! With `xi` non-trivial times before the deadline `t0`, the event that
//! neither other player has finished before `t0` has probability at least
//! `(1 - 2p(1-p))^xi`, after which the deviator behaves persistently. This
//! gives `E >= delta^xi c^(xi-1)(c-1) E[Y'_{3,0}] - t0^2`, evaluated here with
//! exact partial sums of the persistent latency in place of `E[Y'_{3,0}]`.

use num_traits::Pow;
use serde::{Deserialize, Serialize};

use crate::error::{ContentionError, Result};
use crate::probability::Probability;
use crate::schedule::{ratio_to_f64, RationalParam, Schedule};

use super::constants::ExactConstants;
use super::persistent::{persistent_distribution, DivergenceCertificate};

/// Default `z_max` grid for truncated lower bounds.
pub fn default_z_grid() -> Vec<usize> {
    (0..=600).step_by(50).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedLowerBound {
    pub z_max: usize,
    pub lower_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeadlineComparison {
    pub c: RationalParam,
    pub p: Probability,
    pub t0: u64,
    /// Number of non-trivial times strictly before `t0`.
    pub xi: u64,
    #[serde(rename = "prE_lower")]
    pub pr_e_lower: f64,
    pub diverges: bool,
    pub certificate: DivergenceCertificate,
    pub truncated_lower_bounds: Vec<TruncatedLowerBound>,
}

impl DeadlineComparison {
    /// First grid entry whose lower bound exceeds `level`.
    pub fn first_exceeding(&self, level: f64) -> Option<TruncatedLowerBound> {
        self.truncated_lower_bounds
            .iter()
            .copied()
            .find(|b| b.lower_bound > level)
    }
}

pub fn deadline_comparison(c: &RationalParam, p: Probability, t0: u64, z_grid: &[usize]) -> Result<DeadlineComparison> {
    if t0 == 0 {
        return Err(ContentionError::InvalidParameter("deadline t0 must be >= 1".into()));
    }
    let p = p.require_open()?;
    let sched = Schedule::covering(c.clone(), t0)?;
    let xi = sched.count_before(t0)?;
    let exact = ExactConstants::new(p);
    let pr_e = Pow::pow(&exact.delta, xi as u32);
    let pr_e_lower = ratio_to_f64(&pr_e);

    let cf = c.to_f64();
    let factor = pr_e_lower * cf.powi(xi as i32 - 1) * (cf - 1.0);
    let t0_sq = (t0 as f64) * (t0 as f64);
    let z_top = z_grid.iter().copied().max().unwrap_or(0);
    let dist = persistent_distribution(c, p, z_top)?;
    let truncated_lower_bounds = z_grid
        .iter()
        .map(|&z| TruncatedLowerBound {
            z_max: z,
            lower_bound: factor * dist.partial_expectations[z] - t0_sq,
        })
        .collect();

    Ok(DeadlineComparison {
        c: c.clone(),
        p,
        t0,
        xi: xi as u64,
        pr_e_lower,
        diverges: dist.certificate.divergent,
        certificate: dist.certificate,
        truncated_lower_bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(text: &str) -> RationalParam {
        text.parse().unwrap()
    }

    fn p75() -> Probability {
        Probability::new(0.75).unwrap()
    }

    #[test]
    fn xi_and_event_probability() {
        let grid = default_z_grid();
        let r = deadline_comparison(&c("11/10"), p75(), 5, &grid).unwrap();
        assert_eq!(r.xi, 2);
        assert_eq!(r.pr_e_lower, 0.390625);
        let r = deadline_comparison(&c("11/10"), p75(), 1, &grid).unwrap();
        assert_eq!(r.xi, 0);
        assert_eq!(r.pr_e_lower, 1.0);
        let r = deadline_comparison(&c("11/10"), p75(), 14, &grid).unwrap();
        assert_eq!(r.xi, 6);
        assert_eq!(r.pr_e_lower, 0.625f64.powi(6));
        assert!(r.diverges);
    }

    #[test]
    fn lower_bounds_grow_without_limit() {
        let r = deadline_comparison(&c("11/10"), p75(), 14, &default_z_grid()).unwrap();
        for w in r.truncated_lower_bounds.windows(2) {
            assert!(w[1].lower_bound > w[0].lower_bound);
        }
        assert!(r.truncated_lower_bounds[0].lower_bound < 0.0);
        assert!(r.truncated_lower_bounds.last().unwrap().lower_bound > 2759.0);
    }

    #[test]
    fn formula_by_hand() {
        let r = deadline_comparison(&c("11/10"), p75(), 5, &[0, 10]).unwrap();
        let d = persistent_distribution(&c("11/10"), p75(), 10).unwrap();
        // xi = 2: delta^2 c^1 (c-1)
        let factor = 0.390625 * 1.1 * (1.1 - 1.0);
        let expected = factor * d.partial_expectations[10] - 25.0;
        assert!((r.truncated_lower_bounds[1].lower_bound - expected).abs() < 1e-9);
    }

    #[test]
    fn zero_deadline_rejected() {
        assert!(deadline_comparison(&c("11/10"), p75(), 0, &[0]).is_err());
    }
}
