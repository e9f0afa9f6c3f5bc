//! Decision rules for pending players.
//!
//! Every rule maps a player's personal transmission history and the current
//! slot to the probability of transmitting. Three families are provided: the
//! age-based `P(c, p)`, deadline protocols (persistent is deadline 1) and the
//! constant-probability baseline.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ContentionError, Result};
use crate::probability::Probability;
use crate::schedule::{RationalParam, Schedule};

/// Initial horizon used when a schedule is built from a config entry; the
/// engine extends it to cover its slot cap.
pub const DEFAULT_SCHEDULE_HORIZON: usize = 64;

/// Own attempts `X_{i,1}..X_{i,t}` plus pending status.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PersonalHistory {
    attempts: Vec<bool>,
    pending: bool,
}

impl PersonalHistory {
    pub fn new() -> Self {
        PersonalHistory {
            attempts: Vec::new(),
            pending: true,
        }
    }

    pub fn from_attempts(attempts: Vec<bool>, pending: bool) -> Self {
        PersonalHistory { attempts, pending }
    }

    /// Appends the outcome of one slot. A success clears `pending` for good.
    pub fn record(&mut self, attempted: bool, succeeded: bool) {
        self.attempts.push(attempted);
        if succeeded {
            debug_assert!(attempted, "success without an attempt");
            self.pending = false;
        }
    }

    pub fn attempts(&self) -> &[bool] {
        &self.attempts
    }

    pub fn len(&self) -> usize {
        self.attempts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attempts.is_empty()
    }

    pub fn is_pending(&self) -> bool {
        self.pending
    }
}

/// Behaviour of a deadline protocol before its deadline.
#[derive(Clone, Debug, PartialEq)]
pub enum PreRule {
    Quiet,
    FollowAgeBased { schedule: Arc<Schedule>, p: Probability },
    FixedProb { q: Probability },
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProtocolSpec {
    AgeBased { schedule: Arc<Schedule>, p: Probability },
    Deadline { t0: u64, pre_deadline: PreRule },
    ConstantProb { q: Probability },
}

impl ProtocolSpec {
    /// `P(c, p)` with a schedule of the default horizon.
    pub fn age_based(c: RationalParam, p: Probability) -> Result<Self> {
        Ok(ProtocolSpec::AgeBased {
            schedule: Arc::new(Schedule::build(c, DEFAULT_SCHEDULE_HORIZON)?),
            p,
        })
    }

    pub fn deadline(t0: u64, pre_deadline: PreRule) -> Result<Self> {
        if t0 == 0 {
            return Err(ContentionError::InvalidParameter("deadline t0 must be >= 1".into()));
        }
        Ok(ProtocolSpec::Deadline { t0, pre_deadline })
    }

    /// Deadline protocol with deadline 1.
    pub fn persistent() -> Self {
        ProtocolSpec::Deadline {
            t0: 1,
            pre_deadline: PreRule::Quiet,
        }
    }

    pub fn constant(q: Probability) -> Self {
        ProtocolSpec::ConstantProb { q }
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        match self {
            ProtocolSpec::AgeBased { schedule, p } => format!("P({}, {})", schedule.c(), p),
            ProtocolSpec::Deadline { t0: 1, .. } => "persistent".to_string(),
            ProtocolSpec::Deadline { t0, .. } => format!("deadline({t0})"),
            ProtocolSpec::ConstantProb { q } => format!("constant({q})"),
        }
    }

    /// Copy whose schedules reach at least slot `t`.
    pub fn covering(&self, t: u64) -> Result<Self> {
        fn cover(schedule: &Arc<Schedule>, t: u64) -> Result<Arc<Schedule>> {
            if schedule.last_time() >= &t.into() {
                Ok(Arc::clone(schedule))
            } else {
                Ok(Arc::new(Schedule::covering(schedule.c().clone(), t)?))
            }
        }
        Ok(match self {
            ProtocolSpec::AgeBased { schedule, p } => ProtocolSpec::AgeBased {
                schedule: cover(schedule, t)?,
                p: *p,
            },
            ProtocolSpec::Deadline {
                t0,
                pre_deadline: PreRule::FollowAgeBased { schedule, p },
            } => ProtocolSpec::Deadline {
                t0: *t0,
                pre_deadline: PreRule::FollowAgeBased {
                    schedule: cover(schedule, t.min(*t0))?,
                    p: *p,
                },
            },
            other => other.clone(),
        })
    }

    /// Equality of the decision rules, ignoring how far schedules were expanded.
    pub fn same_rule(&self, other: &ProtocolSpec) -> bool {
        fn same_pre(a: &PreRule, b: &PreRule) -> bool {
            match (a, b) {
                (PreRule::Quiet, PreRule::Quiet) => true,
                (PreRule::FollowAgeBased { schedule: s1, p: p1 }, PreRule::FollowAgeBased { schedule: s2, p: p2 }) => {
                    s1.c() == s2.c() && p1 == p2
                }
                (PreRule::FixedProb { q: a }, PreRule::FixedProb { q: b }) => a == b,
                _ => false,
            }
        }
        match (self, other) {
            (ProtocolSpec::AgeBased { schedule: s1, p: p1 }, ProtocolSpec::AgeBased { schedule: s2, p: p2 }) => {
                s1.c() == s2.c() && p1 == p2
            }
            (
                ProtocolSpec::Deadline {
                    t0: a,
                    pre_deadline: pa,
                },
                ProtocolSpec::Deadline {
                    t0: b,
                    pre_deadline: pb,
                },
            ) => a == b && same_pre(pa, pb),
            (ProtocolSpec::ConstantProb { q: a }, ProtocolSpec::ConstantProb { q: b }) => a == b,
            _ => false,
        }
    }
}

/// `f_{i,t}(h_{i,t-1})` for a pending player.
///
/// `history` must hold exactly `t - 1` slots.
pub fn decision_probability(spec: &ProtocolSpec, history: &PersonalHistory, t: u64) -> Result<f64> {
    if !history.is_pending() {
        return Err(ContentionError::ContractViolation(
            "decision rule queried for a player that already transmitted".into(),
        ));
    }
    if t == 0 || history.len() as u64 != t - 1 {
        return Err(ContentionError::ContractViolation(format!(
            "history of length {} does not precede slot {t}",
            history.len()
        )));
    }
    match spec {
        ProtocolSpec::AgeBased { schedule, p } => schedule.transmission_probability(*p, t),
        ProtocolSpec::Deadline { t0, .. } if t >= *t0 => Ok(1.0),
        ProtocolSpec::Deadline { pre_deadline, .. } => match pre_deadline {
            PreRule::Quiet => Ok(0.0),
            PreRule::FollowAgeBased { schedule, p } => schedule.transmission_probability(*p, t),
            PreRule::FixedProb { q } => Ok(q.get()),
        },
        ProtocolSpec::ConstantProb { q } => Ok(q.get()),
    }
}

/// True iff every player runs the same decision rule.
pub fn is_anonymous(profile: &[ProtocolSpec]) -> bool {
    match profile.split_first() {
        Some((first, rest)) => rest.iter().all(|spec| spec.same_rule(first)),
        None => true,
    }
}

/// JSON form of a single protocol entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProtocolConfig {
    AgeBased {
        c: RationalParam,
        p: Probability,
    },
    Deadline {
        t0: u64,
        #[serde(default)]
        pre_deadline: PreRuleConfig,
    },
    Persistent,
    ConstantProb {
        q: Probability,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PreRuleConfig {
    #[default]
    Quiet,
    FollowAgeBased {
        c: RationalParam,
        p: Probability,
    },
    FixedProb {
        q: Probability,
    },
}

impl TryFrom<ProtocolConfig> for ProtocolSpec {
    type Error = ContentionError;

    fn try_from(cfg: ProtocolConfig) -> Result<Self> {
        match cfg {
            ProtocolConfig::AgeBased { c, p } => ProtocolSpec::age_based(c, p),
            ProtocolConfig::Persistent => Ok(ProtocolSpec::persistent()),
            ProtocolConfig::ConstantProb { q } => Ok(ProtocolSpec::constant(q)),
            ProtocolConfig::Deadline { t0, pre_deadline } => {
                let pre = match pre_deadline {
                    PreRuleConfig::Quiet => PreRule::Quiet,
                    PreRuleConfig::FixedProb { q } => PreRule::FixedProb { q },
                    PreRuleConfig::FollowAgeBased { c, p } => PreRule::FollowAgeBased {
                        schedule: Arc::new(Schedule::build(c, DEFAULT_SCHEDULE_HORIZON)?),
                        p,
                    },
                };
                ProtocolSpec::deadline(t0, pre)
            }
        }
    }
}

impl From<&ProtocolSpec> for ProtocolConfig {
    fn from(spec: &ProtocolSpec) -> Self {
        match spec {
            ProtocolSpec::AgeBased { schedule, p } => ProtocolConfig::AgeBased {
                c: schedule.c().clone(),
                p: *p,
            },
            ProtocolSpec::ConstantProb { q } => ProtocolConfig::ConstantProb { q: *q },
            ProtocolSpec::Deadline { t0, pre_deadline } => ProtocolConfig::Deadline {
                t0: *t0,
                pre_deadline: match pre_deadline {
                    PreRule::Quiet => PreRuleConfig::Quiet,
                    PreRule::FixedProb { q } => PreRuleConfig::FixedProb { q: *q },
                    PreRule::FollowAgeBased { schedule, p } => PreRuleConfig::FollowAgeBased {
                        c: schedule.c().clone(),
                        p: *p,
                    },
                },
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p_protocol() -> ProtocolSpec {
        ProtocolSpec::age_based("11/10".parse().unwrap(), Probability::new(0.75).unwrap()).unwrap()
    }

    fn history_of(len: usize) -> PersonalHistory {
        PersonalHistory::from_attempts(vec![false; len], true)
    }

    #[test]
    fn age_based_examples() {
        let spec = p_protocol();
        assert_eq!(decision_probability(&spec, &history_of(2), 3).unwrap(), 1.0);
        assert_eq!(decision_probability(&spec, &history_of(1), 2).unwrap(), 0.75);
        assert_eq!(decision_probability(&spec, &history_of(0), 1).unwrap(), 1.0);
    }

    #[test]
    fn deadline_examples() {
        let persistent = ProtocolSpec::persistent();
        assert_eq!(decision_probability(&persistent, &history_of(0), 1).unwrap(), 1.0);
        let quiet = ProtocolSpec::deadline(5, PreRule::Quiet).unwrap();
        assert_eq!(decision_probability(&quiet, &history_of(3), 4).unwrap(), 0.0);
        assert_eq!(decision_probability(&quiet, &history_of(4), 5).unwrap(), 1.0);
        assert!(ProtocolSpec::deadline(0, PreRule::Quiet).is_err());
    }

    #[test]
    fn deadline_follow_pre_rule() {
        let Some(ProtocolSpec::AgeBased { schedule, p }) = Some(p_protocol()) else {
            unreachable!()
        };
        let spec = ProtocolSpec::deadline(7, PreRule::FollowAgeBased { schedule, p }).unwrap();
        assert_eq!(decision_probability(&spec, &history_of(1), 2).unwrap(), 0.75);
        assert_eq!(decision_probability(&spec, &history_of(2), 3).unwrap(), 1.0);
        // s_3 = 8 is non-trivial for P but past the deadline
        assert_eq!(decision_probability(&spec, &history_of(7), 8).unwrap(), 1.0);
    }

    #[test]
    fn contract_violations() {
        let spec = p_protocol();
        let done = PersonalHistory::from_attempts(vec![true], false);
        assert!(matches!(
            decision_probability(&spec, &done, 2),
            Err(ContentionError::ContractViolation(_))
        ));
        assert!(matches!(
            decision_probability(&spec, &history_of(4), 2),
            Err(ContentionError::ContractViolation(_))
        ));
    }

    #[test]
    fn history_pending_never_reverts() {
        let mut h = PersonalHistory::new();
        h.record(true, false);
        h.record(false, false);
        assert!(h.is_pending());
        h.record(true, true);
        assert!(!h.is_pending());
        assert_eq!(h.attempts(), &[true, false, true]);
    }

    #[test]
    fn anonymity() {
        let p = p_protocol();
        assert!(is_anonymous(&[p.clone(), p.clone(), p.clone()]));
        assert!(!is_anonymous(&[p.clone(), p.clone(), ProtocolSpec::persistent()]));
        let third = ProtocolSpec::constant(Probability::new(1.0 / 3.0).unwrap());
        assert!(is_anonymous(&[third.clone(), third.clone(), third]));
        // expanding a schedule does not change the rule
        assert!(is_anonymous(&[p.clone(), p.covering(100_000).unwrap()]));
    }

    #[test]
    fn config_json_round_trip() {
        let text = r#"{"players":[{"type":"age_based","c":"11/10","p":0.75},
            {"type":"deadline","t0":5,"pre_deadline":{"type":"fixed_prob","q":0.5}},
            {"type":"deadline","t0":3},
            {"type":"persistent"},
            {"type":"constant_prob","q":0.25}]}"#;
        #[derive(Deserialize)]
        struct Players {
            players: Vec<ProtocolConfig>,
        }
        let parsed: Players = serde_json::from_str(text).unwrap();
        let specs: Vec<ProtocolSpec> = parsed
            .players
            .iter()
            .cloned()
            .map(ProtocolSpec::try_from)
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(specs[0].label(), "P(11/10, 0.75)");
        assert_eq!(specs[3], ProtocolSpec::persistent());
        for spec in &specs {
            let cfg = ProtocolConfig::from(spec);
            let back = ProtocolSpec::try_from(cfg).unwrap();
            assert!(back.same_rule(spec));
        }
    }

    proptest! {
        #[test]
        fn age_based_ignores_history(bits_a in proptest::collection::vec(any::<bool>(), 0..60),
                                     seed in any::<u64>()) {
            let spec = p_protocol();
            let t = bits_a.len() as u64 + 1;
            let bits_b: Vec<bool> = (0..bits_a.len()).map(|i| (seed >> (i % 64)) & 1 == 1).collect();
            let a = decision_probability(&spec, &PersonalHistory::from_attempts(bits_a, true), t).unwrap();
            let b = decision_probability(&spec, &PersonalHistory::from_attempts(bits_b, true), t).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn deadline_is_one_from_t0(t0 in 1u64..40, extra in 0u64..40,
                                   bits in proptest::collection::vec(any::<bool>(), 80),
                                   q in 0.0f64..=1.0) {
            let t = t0 + extra;
            let history = PersonalHistory::from_attempts(bits[..(t - 1) as usize].to_vec(), true);
            for pre in [PreRule::Quiet, PreRule::FixedProb { q: Probability::new(q).unwrap() }] {
                let spec = ProtocolSpec::deadline(t0, pre).unwrap();
                prop_assert_eq!(decision_probability(&spec, &history, t).unwrap(), 1.0);
            }
        }
    }
}
