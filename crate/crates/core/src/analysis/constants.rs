use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::probability::Probability;
use crate::schedule::{ratio_to_f64, RationalParam};

/// Per-round non-departure probabilities of the three-player recurrences.
///
/// * `gamma = 1 - (1-p)^2`: a persistent player is not alone at a non-trivial time.
/// * `delta = 1 - 2p(1-p)`: nobody leaves when two players are pending.
/// * `beta  = 1 - 3p(1-p)^2`: nobody leaves when three players are pending.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub gamma: f64,
    pub delta: f64,
    pub beta: f64,
}

/// Exact counterparts of [`DerivedConstants`].
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct ExactConstants {
    pub p: BigRational,
    pub q: BigRational,
    pub gamma: BigRational,
    pub delta: BigRational,
    pub beta: BigRational,
}

impl ExactConstants {
    pub(crate) fn new(p: Probability) -> ExactConstants {
        let one = BigRational::one();
        let p = p.to_ratio();
        let q = &one - &p;
        let two = BigRational::from_integer(BigInt::from(2));
        let three = BigRational::from_integer(BigInt::from(3));
        let gamma = &one - &q * &q;
        let delta = &one - &two * &p * &q;
        let beta = &one - &three * &p * &q * &q;
        ExactConstants {
            p,
            q,
            gamma,
            delta,
            beta,
        }
    }
}

pub fn derive_constants(p: Probability) -> DerivedConstants {
    let exact = ExactConstants::new(p);
    DerivedConstants {
        gamma: ratio_to_f64(&exact.gamma),
        delta: ratio_to_f64(&exact.delta),
        beta: ratio_to_f64(&exact.beta),
    }
}

/// A threshold on `c`, exact and rounded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub exact: RationalParam,
    pub value: f64,
}

impl Threshold {
    fn inverse_of(r: &BigRational) -> Threshold {
        let inv = r.recip();
        Threshold {
            value: ratio_to_f64(&inv),
            exact: RationalParam::from_ratio(inv),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// `1/(1-p)`: the lone-player series converges below it.
    pub inv_1mp: Threshold,
    /// `1/delta`: two-player finiteness.
    pub inv_delta: Threshold,
    /// `1/beta`: three-player finiteness.
    pub inv_beta: Threshold,
    /// `1/gamma`: a persistent deviator has infinite expected latency above it.
    pub persist_lb: Threshold,
}

/// Verdicts for the finiteness and persistence-prevention conditions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub c: RationalParam,
    pub p: Probability,
    pub thresholds: Thresholds,
    /// `1 < c < min{1/(1-p), 1/delta, 1/beta, 2}`.
    pub finite_all_p: bool,
    /// `1/gamma < c <= 2`.
    pub persistent_diverges: bool,
    pub feasible: bool,
    /// Failing inequalities among the finiteness conditions.
    pub finite_violations: Vec<String>,
    /// Failing inequalities among the persistence conditions.
    pub persistent_violations: Vec<String>,
}

/// Evaluates every inequality in exact rational arithmetic.
pub fn feasibility(c: &RationalParam, p: Probability) -> Result<FeasibilityReport> {
    let p = p.require_open()?;
    let exact = ExactConstants::new(p);
    let cr = c.as_ratio();
    let one = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));

    let thresholds = Thresholds {
        inv_1mp: Threshold::inverse_of(&exact.q),
        inv_delta: Threshold::inverse_of(&exact.delta),
        inv_beta: Threshold::inverse_of(&exact.beta),
        persist_lb: Threshold::inverse_of(&exact.gamma),
    };

    let mut finite_violations = Vec::new();
    let mut check = |ok: bool, text: String| {
        if !ok {
            finite_violations.push(text);
        }
        ok
    };
    let upper_checks = [
        check(cr > &one, format!("c > 1 (c = {c})")),
        check(
            cr < thresholds.inv_1mp.exact.as_ratio(),
            format!("c < 1/(1-p) = {}", thresholds.inv_1mp.exact),
        ),
        check(
            cr < thresholds.inv_delta.exact.as_ratio(),
            format!("c < 1/(1-2p(1-p)) = {}", thresholds.inv_delta.exact),
        ),
        check(
            cr < thresholds.inv_beta.exact.as_ratio(),
            format!("c < 1/(1-3p(1-p)^2) = {}", thresholds.inv_beta.exact),
        ),
        check(cr < &two, "c < 2".to_string()),
    ];
    let finite_all_p = upper_checks.iter().all(|&ok| ok);
    let mut persistent_violations = Vec::new();
    let mut check = |ok: bool, text: String| {
        if !ok {
            persistent_violations.push(text);
        }
        ok
    };
    let persist = [
        check(
            cr > thresholds.persist_lb.exact.as_ratio(),
            format!("c > 1/(1-(1-p)^2) = {}", thresholds.persist_lb.exact),
        ),
        check(cr <= &two, "c <= 2".to_string()),
    ];
    let persistent_diverges = persist.iter().all(|&ok| ok);

    Ok(FeasibilityReport {
        c: c.clone(),
        p,
        thresholds,
        finite_all_p,
        persistent_diverges,
        feasible: finite_all_p && persistent_diverges,
        finite_violations,
        persistent_violations,
    })
}

impl FeasibilityReport {
    /// Every failing inequality.
    pub fn violated(&self) -> Vec<String> {
        self.finite_violations
            .iter()
            .chain(&self.persistent_violations)
            .cloned()
            .collect()
    }
}
