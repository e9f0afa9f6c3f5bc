//! Certified enclosures of `E[Y_{n,k}]`, the additional time after `s_{k-1}`
//! that a fixed player needs when `n` players are pending and all run `P(c, p)`.
//!
//! The recurrences
//!
//! ```text
//! E[Y_{2,i}] = x_i + p(1-p) E[Y_{1,i+1}] + delta E[Y_{2,i+1}]
//! E[Y_{3,i}] = x_i + 2p(1-p)^2 E[Y_{2,i+1}] + beta E[Y_{3,i+1}]
//! ```
//!
//! are run backwards from a truncation index `K`, where the unknown values
//! are bracketed by `[0, c^(K-1)(c+1) * bound]` using the closed-form bounds.
//! The same scaled bound caps the upper end at every index.
//! All coefficients are non-negative, so lower and upper ends propagate
//! independently.

use serde::{Deserialize, Serialize};

use crate::error::{ContentionError, Result};
use crate::probability::Probability;
use crate::schedule::{RationalParam, Schedule};

use super::bounds::{delta_bound, min_truncation_k1, y30_upper};
use super::constants::{derive_constants, feasibility};
use super::Semantics;

pub const DEFAULT_TRUNCATION_K: usize = 60;

/// Relative size of the neglected tail of the lone-player series.
const SERIES_TAIL_TOLERANCE: f64 = 1e-14;
const MAX_SERIES_TERMS: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectationInterval {
    pub lower: f64,
    pub upper: f64,
    pub truncation_k: usize,
    pub semantics: Semantics,
}

impl ExpectationInterval {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    /// The interval grown by `margin` on both sides.
    pub fn widened(&self, margin: f64) -> ExpectationInterval {
        ExpectationInterval {
            lower: self.lower - margin,
            upper: self.upper + margin,
            ..*self
        }
    }
}

/// Enclosures for `n = 1, 2, 3` pending players, indexed by `k = 0..=K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectationTable {
    pub c: RationalParam,
    pub p: Probability,
    pub semantics: Semantics,
    pub truncation_k: usize,
    pub y1: Vec<ExpectationInterval>,
    pub y2: Vec<ExpectationInterval>,
    pub y3: Vec<ExpectationInterval>,
}

impl ExpectationTable {
    /// Enclosure of the unconditional latency of a fixed player.
    pub fn latency(&self) -> ExpectationInterval {
        self.y3[0]
    }
}

/// Lone-player expectation when only non-trivial times can succeed:
/// `sum_{l >= k} (s_l - s_{k-1}) p (1-p)^(l-k)`, summed until the
/// geometric tail bound is negligible.
fn paper_series_y1(sched: &Schedule, k: usize, p: f64, terms: usize, tail_scale: f64, r: f64) -> (f64, f64) {
    let q = 1.0 - p;
    let mut gap_sum = 0.0;
    let mut weight = p;
    let mut total = 0.0;
    for l in k..k + terms {
        gap_sum += sched.x_f64(l);
        total += gap_sum * weight;
        weight *= q;
    }
    // (s_l - s_{k-1}) <= 2 c^(l+1) / (c-1), summed against p (1-p)^(l-k) for l >= k + terms
    let tail = tail_scale * r.powi(terms as i32);
    (total, total + tail)
}

pub fn solve_expectations(
    c: &RationalParam,
    p: Probability,
    semantics: Semantics,
    truncation_k: usize,
) -> Result<ExpectationTable> {
    let verdict = feasibility(c, p)?;
    if !verdict.finite_all_p {
        return Err(ContentionError::Divergence(format!(
            "expected latency is not certified finite: {}",
            verdict.finite_violations.join("; ")
        )));
    }
    let big_k = truncation_k;
    let k1 = min_truncation_k1(c, p)?;
    let two_player_bound = delta_bound(c, p, k1)?;
    let three_player_bound = y30_upper(c, p, k1)?;
    let consts = derive_constants(p);
    let (cf, pf) = (c.to_f64(), p.get());
    let q = 1.0 - pf;
    let r = cf * q;

    // lone-player series length for the largest index needed (k = K)
    let tail_base = 2.0 * cf * pf / ((cf - 1.0) * (1.0 - r));
    let terms = match semantics {
        Semantics::Literal => 0,
        Semantics::PaperSeries => {
            // tail(k, M) = tail_base * c^k * r^M; x_k >= 2 bounds the sum below
            let scale = tail_base * cf.powi(big_k as i32) / (2.0 * SERIES_TAIL_TOLERANCE);
            let m = (scale.ln() / -r.ln()).ceil().max(1.0) as usize;
            if m > MAX_SERIES_TERMS {
                return Err(ContentionError::DivergentSeries(format!(
                    "lone-player series needs {m} terms (c(1-p) = {r})"
                )));
            }
            m
        }
    };
    let sched = Schedule::build(c.clone(), big_k + 1 + terms)?;

    let interval = |lower: f64, upper: f64| ExpectationInterval {
        lower,
        upper,
        truncation_k: big_k,
        semantics,
    };

    let y1: Vec<ExpectationInterval> = (0..=big_k + 1)
        .map(|k| match semantics {
            // the slot right after s_{k-1} is trivial, a lone player sends with probability 1
            Semantics::Literal => interval(1.0, 1.0),
            Semantics::PaperSeries => {
                let (lo, hi) = paper_series_y1(&sched, k, pf, terms, tail_base * cf.powi(k as i32), r);
                interval(lo, hi)
            }
        })
        .collect();

    // E[Y_{n,i}] <= c^(i-1)(c+1) E[Y_{n,0}] holds at every index, so each
    // propagated upper end is clamped by it; this also nests the enclosures in K.
    let scale = |i: usize| {
        if i == 0 {
            1.0
        } else {
            cf.powi(i as i32 - 1) * (cf + 1.0)
        }
    };
    let mut y2 = vec![interval(0.0, scale(big_k) * two_player_bound); big_k + 1];
    let mut y3 = vec![interval(0.0, scale(big_k) * three_player_bound); big_k + 1];

    let leave2 = pf * q;
    let leave3 = 2.0 * pf * q * q;
    for i in (0..big_k).rev() {
        let x = sched.x_f64(i);
        y2[i] = interval(
            x + leave2 * y1[i + 1].lower + consts.delta * y2[i + 1].lower,
            (x + leave2 * y1[i + 1].upper + consts.delta * y2[i + 1].upper).min(scale(i) * two_player_bound),
        );
        y3[i] = interval(
            x + leave3 * y2[i + 1].lower + consts.beta * y3[i + 1].lower,
            (x + leave3 * y2[i + 1].upper + consts.beta * y3[i + 1].upper).min(scale(i) * three_player_bound),
        );
    }

    let mut y1 = y1;
    y1.truncate(big_k + 1);
    Ok(ExpectationTable {
        c: c.clone(),
        p,
        semantics,
        truncation_k: big_k,
        y1,
        y2,
        y3,
    })
}
