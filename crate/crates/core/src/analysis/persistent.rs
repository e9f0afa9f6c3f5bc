//! Exact latency distribution of a persistent deviator against two `P(c, p)`
//! players.
//!
//! The deviator collides at every trivial slot, and at `s_z` it succeeds
//! exactly when both others stay quiet, probability `(1-p)^2`. With `Z` the
//! number of failed non-trivial rounds, `Z + 1` is geometric and the latency
//! is `s_Z`, so `Pr(latency = s_z) = gamma^z (1-p)^2`.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{ContentionError, Result};
use crate::probability::Probability;
use crate::schedule::{big_uint_list, ratio_to_f64, RationalParam, Schedule};

use super::constants::ExactConstants;
use super::expectations::ExpectationInterval;
use super::Semantics;

/// Ratio-test evidence for divergence of `sum_z s_z gamma^z (1-p)^2`.
///
/// Successive terms grow by a factor tending to `c * gamma`; the series
/// diverges when that limit exceeds 1 (with `c <= 2`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceCertificate {
    pub divergent: bool,
    pub ratio_limit: f64,
    pub ratio_limit_exact: RationalParam,
    /// `1/gamma`: the smallest `c` for which divergence holds.
    pub threshold: RationalParam,
}

impl DivergenceCertificate {
    pub(crate) fn new(c: &RationalParam, p: Probability) -> DivergenceCertificate {
        let exact = ExactConstants::new(p);
        let limit = c.as_ratio() * &exact.gamma;
        let two = BigRational::from_integer(BigInt::from(2));
        DivergenceCertificate {
            divergent: limit > BigRational::one() && c.as_ratio() <= &two,
            ratio_limit: ratio_to_f64(&limit),
            ratio_limit_exact: RationalParam::from_ratio(limit),
            threshold: RationalParam::from_ratio(exact.gamma.recip()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PersistentDistribution {
    pub c: RationalParam,
    pub p: Probability,
    pub z_max: usize,
    /// `s_0..=s_zmax`.
    #[serde(with = "big_uint_list")]
    pub support: Vec<BigUint>,
    /// `gamma^z (1-p)^2`.
    pub pmf: Vec<f64>,
    /// `sum_{u <= z} s_u pmf(u)`, summed exactly.
    pub partial_expectations: Vec<f64>,
    /// `sum_{u <= z} pmf(u)`.
    pub partial_mass: Vec<f64>,
    /// Growth of consecutive terms `s_z pmf(z) / (s_{z-1} pmf(z-1))`, for `z >= 1`.
    pub term_ratios: Vec<f64>,
    /// `E[Z + 1] = 1/(1-p)^2`.
    pub expected_rounds: f64,
    /// `floor(E[Z])`.
    pub jensen_index: usize,
    /// `s_{floor(E[Z])}`, below the true mean by convexity.
    pub jensen_lower: f64,
    pub certificate: DivergenceCertificate,
}

impl PersistentDistribution {
    /// Index of the first partial expectation above `level`, if reached.
    pub fn first_partial_above(&self, level: f64) -> Option<usize> {
        self.partial_expectations.iter().position(|&v| v > level)
    }
}

pub fn persistent_distribution(c: &RationalParam, p: Probability, z_max: usize) -> Result<PersistentDistribution> {
    let p = p.require_open()?;
    let exact = ExactConstants::new(p);
    let expected_rounds_exact = (&exact.q * &exact.q).recip();
    let expected_z = &expected_rounds_exact - BigRational::one();
    let jensen_index = expected_z
        .floor()
        .to_integer()
        .to_usize()
        .ok_or_else(|| ContentionError::InvalidParameter("E[Z] too large".into()))?;

    let sched = Schedule::build(c.clone(), z_max.max(jensen_index))?;
    let support: Vec<BigUint> = sched.s()[..=z_max].to_vec();

    // partial_z = N_z * qn / (gd^z * qd) with N_z = N_{z-1} gd + s_z gn^z
    let q2 = &exact.q * &exact.q;
    let (gn, gd) = (exact.gamma.numer().clone(), exact.gamma.denom().clone());
    let (qn, qd) = (q2.numer().clone(), q2.denom().clone());
    let mut gn_pow = BigInt::one();
    let mut gd_pow = BigInt::one();
    let mut acc = BigInt::from(0);
    let mut mass = BigInt::from(0);
    let mut pmf = Vec::with_capacity(z_max + 1);
    let mut partial_expectations = Vec::with_capacity(z_max + 1);
    let mut partial_mass = Vec::with_capacity(z_max + 1);
    for s in &support {
        let s = BigInt::from_biguint(Sign::Plus, s.clone());
        acc = acc * &gd + s * &gn_pow;
        mass = mass * &gd + &gn_pow;
        let denom = &gd_pow * &qd;
        // unreduced: the conversion rounds correctly without a gcd
        pmf.push(ratio_to_f64(&BigRational::new_raw(&gn_pow * &qn, denom.clone())));
        partial_expectations.push(ratio_to_f64(&BigRational::new_raw(&acc * &qn, denom.clone())));
        partial_mass.push(ratio_to_f64(&BigRational::new_raw(&mass * &qn, denom)));
        gn_pow *= &gn;
        gd_pow *= &gd;
    }

    let term_ratios = (1..=z_max)
        .map(|z| {
            let ratio = BigRational::new(
                BigInt::from_biguint(Sign::Plus, support[z].clone()),
                BigInt::from_biguint(Sign::Plus, support[z - 1].clone()),
            ) * &exact.gamma;
            ratio_to_f64(&ratio)
        })
        .collect();

    Ok(PersistentDistribution {
        c: c.clone(),
        p,
        z_max,
        support,
        pmf,
        partial_expectations,
        partial_mass,
        term_ratios,
        expected_rounds: ratio_to_f64(&expected_rounds_exact),
        jensen_index,
        jensen_lower: sched.s_f64(jensen_index),
        certificate: DivergenceCertificate::new(c, p),
    })
}

/// `E[Y'_{3,k}] = sum_{u >= 0} gamma^u x_{k+u}` when `c * gamma < 1`, enclosed
/// between a partial sum and a geometric tail bound.
pub fn persistent_expectation(c: &RationalParam, p: Probability, k: usize) -> Result<ExpectationInterval> {
    let p = p.require_open()?;
    let cert = DivergenceCertificate::new(c, p);
    if cert.ratio_limit_exact.as_ratio() >= &BigRational::one() {
        return Err(ContentionError::Divergence(format!(
            "c * gamma = {} >= 1",
            cert.ratio_limit
        )));
    }
    let cf = c.to_f64();
    let gamma = 1.0 - (1.0 - p.get()).powi(2);
    let ratio = cf * gamma;
    // tail after m terms: sum_{u >= m} gamma^u 2 c^(k+u) = 2 c^k ratio^m / (1 - ratio)
    let base = 2.0 * cf.powi(k as i32) / (1.0 - ratio);
    let m = ((base / 1e-12).ln() / -ratio.ln()).ceil().max(1.0) as usize;
    let sched = Schedule::build(c.clone(), k + m)?;
    let mut weight = 1.0;
    let mut total = 0.0;
    for u in 0..m {
        total += weight * sched.x_f64(k + u);
        weight *= gamma;
    }
    Ok(ExpectationInterval {
        lower: total,
        upper: total + base * ratio.powi(m as i32),
        truncation_k: m,
        semantics: Semantics::Literal,
    })
}
