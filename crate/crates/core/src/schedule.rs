//! Exact transmission schedule of the age-based protocol `P(c, p)`.
//!
//! A pending player following `P(c, p)` transmits with probability `p` at
//! the non-trivial times `s_k = x_0 + ... + x_k`, where `x_j = floor(2 c^j)`,
//! and with probability 1 at every other slot. All schedule arithmetic is
//! done over unbounded integers with `c` held as an exact rational.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ContentionError, Result};
use crate::probability::Probability;

/// An exact rational number, kept in lowest terms with a positive denominator.
///
/// Parses from `"num/den"`, plain integers and finite decimals (`"1.1"` is
/// exactly `11/10`). Serialises as the `"num/den"` text form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalParam(BigRational);

impl RationalParam {
    pub fn new(numerator: i64, denominator: i64) -> Result<Self> {
        if denominator == 0 {
            return Err(ContentionError::InvalidParameter(
                "rational with zero denominator".into(),
            ));
        }
        Ok(RationalParam(BigRational::new(
            BigInt::from(numerator),
            BigInt::from(denominator),
        )))
    }

    pub fn from_ratio(value: BigRational) -> Self {
        RationalParam(value)
    }

    pub fn integer(value: i64) -> Self {
        RationalParam(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn into_ratio(self) -> BigRational {
        self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.0)
    }
}

/// Closest `f64` to an exact rational (`to_f64` on `Ratio` already rounds
/// correctly for big operands).
pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl fmt::Display for RationalParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for RationalParam {
    type Err = ContentionError;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || ContentionError::InvalidParameter(format!("cannot parse rational {text:?}"));
        if let Some((num, den)) = text.split_once('/') {
            let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
            let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            return Ok(RationalParam(BigRational::new(num, den)));
        }
        if let Some((whole, frac)) = text.split_once('.') {
            let negative = whole.starts_with('-');
            let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
            if digits.is_empty() || !digits.chars().all(|ch| ch.is_ascii_digit()) {
                return Err(bad());
            }
            let mut num = BigInt::from_str(&digits).map_err(|_| bad())?;
            if negative {
                num = -num;
            }
            let den = Pow::pow(BigInt::from(10u32), frac.len() as u32);
            return Ok(RationalParam(BigRational::new(num, den)));
        }
        let num = BigInt::from_str(text).map_err(|_| bad())?;
        Ok(RationalParam(BigRational::from_integer(num)))
    }
}

impl Serialize for RationalParam {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RationalParam {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(v) => Ok(RationalParam::integer(v)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Non-trivial transmission times `s_0..=s_K` and gaps `x_0..=x_K` of `P(c, p)`.
///
/// Immutable once built; [`Schedule::extended`] returns a longer copy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    c: RationalParam,
    x: Vec<BigUint>,
    s: Vec<BigUint>,
}

/// Exact evaluation of both sides of the domination inequality
/// `c^(k'-k-1) (c-1) x_{k+j} <= x_{k'+j} <= c^(k'-k-1) (c+1) x_{k+j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominationCheck {
    pub lower: BigRational,
    pub value: BigUint,
    pub upper: BigRational,
    pub holds: bool,
}

fn to_biguint(v: &BigInt) -> BigUint {
    v.to_biguint().expect("non-negative by construction")
}

impl Schedule {
    /// Builds `x_0..=x_horizon_k` and their running sums.
    pub fn build(c: RationalParam, horizon_k: usize) -> Result<Self> {
        if c.as_ratio() < &BigRational::one() {
            return Err(ContentionError::InvalidParameter(format!(
                "schedule constant c = {c} must satisfy c >= 1"
            )));
        }
        let mut sched = Schedule {
            c,
            x: Vec::with_capacity(horizon_k + 1),
            s: Vec::with_capacity(horizon_k + 1),
        };
        sched.grow_to(horizon_k);
        Ok(sched)
    }

    /// Smallest schedule whose last non-trivial time is at least `t`.
    pub fn covering(c: RationalParam, t: u64) -> Result<Self> {
        let mut sched = Schedule::build(c, 0)?;
        let target = BigUint::from(t);
        while sched.s.last().expect("non-empty") < &target {
            let next = (sched.x.len() * 2).max(8);
            sched.grow_to(next - 1);
        }
        // trim back to the first index that covers `t`
        let idx = sched.s.partition_point(|v| v < &target);
        sched.x.truncate(idx + 1);
        sched.s.truncate(idx + 1);
        Ok(sched)
    }

    /// Copy of this schedule extended to `horizon_k` (no-op when already long enough).
    pub fn extended(&self, horizon_k: usize) -> Schedule {
        let mut out = self.clone();
        out.grow_to(horizon_k);
        out
    }

    fn grow_to(&mut self, horizon_k: usize) {
        let start = self.x.len();
        if horizon_k < start {
            return;
        }
        let num = to_biguint(self.c.numer());
        let den = to_biguint(self.c.denom());
        let two = BigUint::from(2u32);
        let mut num_pow = Pow::pow(&num, start as u32);
        let mut den_pow = Pow::pow(&den, start as u32);
        for _ in start..=horizon_k {
            let xk = (&two * &num_pow) / &den_pow;
            let sk = match self.s.last() {
                Some(prev) => prev + &xk,
                None => xk.clone(),
            };
            self.x.push(xk);
            self.s.push(sk);
            num_pow *= &num;
            den_pow *= &den;
        }
    }

    pub fn c(&self) -> &RationalParam {
        &self.c
    }

    /// Largest index `K` for which `x_K`, `s_K` are stored.
    pub fn horizon_k(&self) -> usize {
        self.x.len() - 1
    }

    pub fn x(&self) -> &[BigUint] {
        &self.x
    }

    pub fn s(&self) -> &[BigUint] {
        &self.s
    }

    /// `s_k`, with `s_k = 0` for negative `k`.
    pub fn s_at(&self, k: i64) -> Option<BigUint> {
        if k < 0 {
            Some(BigUint::zero())
        } else {
            self.s.get(k as usize).cloned()
        }
    }

    pub fn x_f64(&self, k: usize) -> f64 {
        self.x[k].to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn s_f64(&self, k: usize) -> f64 {
        self.s[k].to_f64().unwrap_or(f64::INFINITY)
    }

    /// Last non-trivial time covered by the schedule.
    pub fn last_time(&self) -> &BigUint {
        self.s.last().expect("schedule is never empty")
    }

    fn ensure_covers(&self, t: u64) -> Result<BigUint> {
        let t_big = BigUint::from(t);
        if &t_big > self.last_time() {
            return Err(ContentionError::HorizonExceeded {
                t,
                covered: self.last_time().to_string(),
            });
        }
        Ok(t_big)
    }

    /// Whether slot `t` is one of the `s_k`.
    pub fn is_nontrivial(&self, t: u64) -> Result<bool> {
        let t_big = self.ensure_covers(t)?;
        Ok(self.s.binary_search(&t_big).is_ok())
    }

    /// `P(c, p)_t`: `p` on the non-trivial times, 1 everywhere else.
    pub fn transmission_probability(&self, p: Probability, t: u64) -> Result<f64> {
        if t == 0 {
            return Err(ContentionError::InvalidArguments("slots start at t = 1".into()));
        }
        Ok(if self.is_nontrivial(t)? { p.get() } else { 1.0 })
    }

    /// Number of non-trivial times strictly before `t0`.
    pub fn count_before(&self, t0: u64) -> Result<usize> {
        let t_big = self.ensure_covers(t0)?;
        Ok(self.s.partition_point(|v| v < &t_big))
    }

    /// Non-trivial times that fit into `u64` and do not exceed `limit`.
    pub fn times_up_to(&self, limit: u64) -> Vec<u64> {
        let limit = BigUint::from(limit);
        self.s
            .iter()
            .take_while(|v| *v <= &limit)
            .map(|v| v.to_u64().expect("bounded by a u64 limit"))
            .collect()
    }

    /// Evaluates the domination inequalities for `x_{k+j}` and `x_{k'+j}`.
    pub fn check_domination(&self, k: usize, k_prime: usize, j: usize) -> Result<DominationCheck> {
        if k_prime <= k {
            return Err(ContentionError::InvalidArguments(format!(
                "domination check needs k' > k (got k = {k}, k' = {k_prime})"
            )));
        }
        let c = self.c.as_ratio();
        if c > &BigRational::from_integer(2.into()) {
            return Err(ContentionError::InvalidParameter(format!(
                "domination inequalities need c in [1, 2], got {}",
                self.c
            )));
        }
        if k_prime + j > self.horizon_k() {
            return Err(ContentionError::InvalidArguments(format!(
                "index {} beyond schedule horizon {}",
                k_prime + j,
                self.horizon_k()
            )));
        }
        let base = BigRational::from_integer(BigInt::from_biguint(Sign::Plus, self.x[k + j].clone()));
        let scale = Pow::pow(c, (k_prime - k - 1) as u32) * &base;
        let one = BigRational::one();
        let lower = &scale * (c - &one);
        let upper = &scale * (c + &one);
        let value = self.x[k_prime + j].clone();
        let value_q = BigRational::from_integer(BigInt::from_biguint(Sign::Plus, value.clone()));
        let holds = lower.cmp(&value_q) != Ordering::Greater && value_q <= upper;
        Ok(DominationCheck {
            lower,
            value,
            upper,
            holds,
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WireInt {
    Small(u64),
    Big(String),
}

impl From<&BigUint> for WireInt {
    fn from(v: &BigUint) -> Self {
        match v.to_u64() {
            Some(small) => WireInt::Small(small),
            None => WireInt::Big(v.to_string()),
        }
    }
}

impl TryFrom<WireInt> for BigUint {
    type Error = ContentionError;

    fn try_from(v: WireInt) -> Result<Self> {
        match v {
            WireInt::Small(n) => Ok(BigUint::from(n)),
            WireInt::Big(text) => {
                BigUint::from_str(&text).map_err(|_| ContentionError::Config(format!("bad integer {text:?}")))
            }
        }
    }
}

/// Serde adapter for lists of unbounded integers: entries that fit in `u64`
/// are written as JSON numbers, larger ones as decimal strings.
pub(crate) mod big_uint_list {
    use super::*;

    pub fn serialize<S: Serializer>(values: &[BigUint], serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(values.iter().map(WireInt::from))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Vec<BigUint>, D::Error> {
        Vec::<WireInt>::deserialize(deserializer)?
            .into_iter()
            .map(|w| BigUint::try_from(w).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct WireSchedule {
    c: RationalParam,
    s: Vec<WireInt>,
    x: Vec<WireInt>,
}

impl Serialize for Schedule {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        WireSchedule {
            c: self.c.clone(),
            s: self.s.iter().map(WireInt::from).collect(),
            x: self.x.iter().map(WireInt::from).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Schedule {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let wire = WireSchedule::deserialize(deserializer)?;
        if wire.s.is_empty() || wire.s.len() != wire.x.len() {
            return Err(D::Error::custom("schedule needs equally long, non-empty s and x"));
        }
        let s = wire
            .s
            .into_iter()
            .map(BigUint::try_from)
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let x = wire
            .x
            .into_iter()
            .map(BigUint::try_from)
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let rebuilt = Schedule::build(wire.c, s.len() - 1).map_err(D::Error::custom)?;
        if rebuilt.s != s || rebuilt.x != x {
            return Err(D::Error::custom("schedule values disagree with c"));
        }
        Ok(rebuilt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(text: &str) -> RationalParam {
        text.parse().unwrap()
    }

    fn ints(v: &[BigUint]) -> Vec<u64> {
        v.iter().map(|b| b.to_u64().unwrap()).collect()
    }

    // Brute-force floor(2 c^j) from a fresh power, independent of the
    // incremental path in `grow_to`.
    fn fresh_x(num: u64, den: u64, j: u32) -> BigUint {
        let n = Pow::pow(BigUint::from(num), j);
        let d = Pow::pow(BigUint::from(den), j);
        (BigUint::from(2u32) * n) / d
    }

    #[test]
    fn eleven_tenths_prefix() {
        let sched = Schedule::build(c("11/10"), 8).unwrap();
        assert_eq!(ints(sched.s()), vec![2, 4, 6, 8, 10, 13, 16, 19, 23]);
        assert_eq!(ints(sched.x()), vec![2, 2, 2, 2, 2, 3, 3, 3, 4]);
    }

    #[test]
    fn unit_and_doubling_constants() {
        let one = Schedule::build(c("1"), 4).unwrap();
        assert_eq!(ints(one.x()), vec![2; 5]);
        assert_eq!(ints(one.s()), vec![2, 4, 6, 8, 10]);

        let two = Schedule::build(c("2"), 2).unwrap();
        assert_eq!(ints(two.x()), vec![2, 4, 8]);
        assert_eq!(ints(two.s()), vec![2, 6, 14]);
    }

    #[test]
    fn rejects_c_below_one() {
        assert!(matches!(
            Schedule::build(c("9/10"), 3),
            Err(ContentionError::InvalidParameter(_))
        ));
    }

    #[test]
    fn decimal_and_fraction_parse_alike() {
        assert_eq!(c("1.1"), c("11/10"));
        assert_eq!(c("22/20"), c("11/10"));
        assert_eq!(c("11/10").to_string(), "11/10");
        assert_eq!(c("4/2").to_string(), "2");
        assert!("1/0".parse::<RationalParam>().is_err());
        assert!("abc".parse::<RationalParam>().is_err());
    }

    #[test]
    fn incremental_matches_fresh_powering() {
        let sched = Schedule::build(c("11/10"), 300).unwrap();
        let mut running = BigUint::zero();
        for j in 0..=300u32 {
            let xj = fresh_x(11, 10, j);
            running += &xj;
            assert_eq!(sched.x()[j as usize], xj);
            assert_eq!(sched.s()[j as usize], running);
        }
        // s_300 ~ 2 * 1.1^301 / 0.1 overflows nothing here but x grows past u32
        assert!(sched.x()[300] > BigUint::from(u32::MAX));
    }

    #[test]
    fn extension_agrees_with_direct_build() {
        let short = Schedule::build(c("7/5"), 10).unwrap();
        let long = short.extended(40);
        assert_eq!(long, Schedule::build(c("7/5"), 40).unwrap());
        assert_eq!(short.extended(5), short);
    }

    #[test]
    fn covering_stops_at_first_cover() {
        let sched = Schedule::covering(c("11/10"), 13).unwrap();
        assert_eq!(sched.last_time(), &BigUint::from(13u32));
        let sched = Schedule::covering(c("11/10"), 14).unwrap();
        assert_eq!(sched.last_time(), &BigUint::from(16u32));
        let sched = Schedule::covering(c("11/10"), 1).unwrap();
        assert_eq!(sched.horizon_k(), 0);
    }

    #[test]
    fn probability_lookup() {
        let sched = Schedule::build(c("11/10"), 8).unwrap();
        let p = Probability::new(0.75).unwrap();
        assert_eq!(sched.transmission_probability(p, 2).unwrap(), 0.75);
        assert_eq!(sched.transmission_probability(p, 1).unwrap(), 1.0);
        assert_eq!(sched.transmission_probability(p, 13).unwrap(), 0.75);
        assert_eq!(sched.transmission_probability(p, 14).unwrap(), 1.0);
        assert!(matches!(
            sched.transmission_probability(p, 24),
            Err(ContentionError::HorizonExceeded { t: 24, .. })
        ));
    }

    #[test]
    fn probability_exhaustive_scan() {
        let sched = Schedule::build(c("11/10"), 60).unwrap();
        let p = Probability::new(0.3).unwrap();
        let times = sched.times_up_to(u64::MAX);
        let last = *times.last().unwrap();
        for t in 1..=last {
            let expected = if times.contains(&t) { 0.3 } else { 1.0 };
            assert_eq!(sched.transmission_probability(p, t).unwrap(), expected, "t = {t}");
        }
    }

    #[test]
    fn counts_before_deadline() {
        let sched = Schedule::build(c("11/10"), 10).unwrap();
        assert_eq!(sched.count_before(1).unwrap(), 0);
        assert_eq!(sched.count_before(5).unwrap(), 2);
        assert_eq!(sched.count_before(14).unwrap(), 6);
        assert_eq!(sched.count_before(13).unwrap(), 5);
    }

    #[test]
    fn domination_examples() {
        let sched = Schedule::build(c("11/10"), 10).unwrap();
        let chk = sched.check_domination(0, 2, 0).unwrap();
        assert_eq!(chk.lower, BigRational::new(22.into(), 100.into()));
        assert_eq!(chk.value, BigUint::from(2u32));
        assert_eq!(chk.upper, BigRational::new(462.into(), 100.into()));
        assert!(chk.holds);

        let sched = Schedule::build(c("2"), 5).unwrap();
        let chk = sched.check_domination(0, 3, 0).unwrap();
        assert_eq!(chk.lower, BigRational::from_integer(8.into()));
        assert_eq!(chk.value, BigUint::from(16u32));
        assert_eq!(chk.upper, BigRational::from_integer(24.into()));
        assert!(chk.holds);

        let sched = Schedule::build(c("1"), 20).unwrap();
        let chk = sched.check_domination(3, 9, 4).unwrap();
        assert!(chk.lower.is_zero());
        assert_eq!(chk.upper, BigRational::from_integer(4.into()));
        assert!(chk.holds);
    }

    #[test]
    fn domination_argument_errors() {
        let sched = Schedule::build(c("11/10"), 10).unwrap();
        assert!(matches!(
            sched.check_domination(2, 2, 0),
            Err(ContentionError::InvalidArguments(_))
        ));
        assert!(matches!(
            sched.check_domination(3, 1, 0),
            Err(ContentionError::InvalidArguments(_))
        ));
        assert!(sched.check_domination(0, 8, 5).is_err());
        let wide = Schedule::build(c("5/2"), 10).unwrap();
        assert!(wide.check_domination(0, 1, 0).is_err());
    }

    #[test]
    fn json_shape() {
        let sched = Schedule::build(c("11/10"), 3).unwrap();
        let text = serde_json::to_string(&sched).unwrap();
        assert_eq!(text, r#"{"c":"11/10","s":[2,4,6,8],"x":[2,2,2,2]}"#);
        let back: Schedule = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sched);
        assert!(serde_json::from_str::<Schedule>(r#"{"c":"11/10","s":[2,4,7],"x":[2,2,3]}"#).is_err());
    }

    #[test]
    fn json_round_trip_with_huge_entries() {
        let sched = Schedule::build(c("2"), 80).unwrap();
        let text = serde_json::to_string(&sched).unwrap();
        let back: Schedule = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sched);
    }
}
