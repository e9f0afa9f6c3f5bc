use std::sync::Arc;

use crate::error::Result;
use crate::protocols::{decision_probability, PersonalHistory, PreRule, ProtocolSpec};
use crate::rng::cell_uniform;

use super::{GameConfig, SlotOutcome, TrialOutcome};

/// Per-slot rule evaluation with a cursor into the non-trivial times, so
/// that the trial loop never searches the schedule.
#[derive(Clone, Debug)]
enum PreparedRule {
    AgeBased { times: Arc<[u64]>, p: f64 },
    Deadline { t0: u64, pre: PreparedPre },
    Constant { q: f64 },
}

#[derive(Clone, Debug)]
enum PreparedPre {
    Quiet,
    Follow { times: Arc<[u64]>, p: f64 },
    Fixed { q: f64 },
}

/// Probability at `t` and the first later slot at which it may change.
#[inline]
fn age_based_at(times: &[u64], p: f64, cursor: &mut usize, t: u64) -> (f64, u64) {
    while *cursor < times.len() && times[*cursor] < t {
        *cursor += 1;
    }
    match times.get(*cursor) {
        Some(&s) if s == t => (p, t + 1),
        Some(&s) => (1.0, s),
        None => (1.0, u64::MAX),
    }
}

#[inline]
fn constant_at(q: f64, t: u64, until: u64) -> (f64, u64) {
    if q > 0.0 && q < 1.0 {
        (q, t + 1)
    } else {
        (q, until)
    }
}

impl PreparedRule {
    fn new(spec: &ProtocolSpec, slot_cap: u64) -> PreparedRule {
        match spec {
            ProtocolSpec::AgeBased { schedule, p } => PreparedRule::AgeBased {
                times: schedule.times_up_to(slot_cap).into(),
                p: p.get(),
            },
            ProtocolSpec::ConstantProb { q } => PreparedRule::Constant { q: q.get() },
            ProtocolSpec::Deadline { t0, pre_deadline } => PreparedRule::Deadline {
                t0: *t0,
                pre: match pre_deadline {
                    PreRule::Quiet => PreparedPre::Quiet,
                    PreRule::FixedProb { q } => PreparedPre::Fixed { q: q.get() },
                    PreRule::FollowAgeBased { schedule, p } => PreparedPre::Follow {
                        times: schedule.times_up_to(slot_cap.min(*t0)).into(),
                        p: p.get(),
                    },
                },
            },
        }
    }

    #[inline]
    fn at(&self, cursor: &mut usize, t: u64) -> (f64, u64) {
        match self {
            PreparedRule::AgeBased { times, p } => age_based_at(times, *p, cursor, t),
            PreparedRule::Constant { q } => constant_at(*q, t, u64::MAX),
            PreparedRule::Deadline { t0, .. } if t >= *t0 => (1.0, u64::MAX),
            PreparedRule::Deadline { t0, pre } => match pre {
                PreparedPre::Quiet => (0.0, *t0),
                PreparedPre::Fixed { q } => constant_at(*q, t, *t0),
                PreparedPre::Follow { times, p } => {
                    let (prob, next) = age_based_at(times, *p, cursor, t);
                    (prob, next.min(*t0))
                }
            },
        }
    }
}

/// A configuration compiled for fast repeated trials.
#[derive(Clone, Debug)]
pub(crate) struct PreparedGame {
    rules: Vec<PreparedRule>,
    seed: u64,
    slot_cap: u64,
}

impl PreparedGame {
    pub(crate) fn new(config: &GameConfig) -> Result<PreparedGame> {
        let rules = config
            .profile()
            .iter()
            .map(|spec| {
                spec.covering(config.slot_cap())
                    .map(|s| PreparedRule::new(&s, config.slot_cap()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PreparedGame {
            rules,
            seed: config.seed(),
            slot_cap: config.slot_cap(),
        })
    }

    /// Plays one game. Stretches of slots in which every pending player's
    /// probability is 0 or 1 and the outcome is a collision or idle are
    /// skipped in one step; they change no state and consume no draws.
    pub(crate) fn run(&self, trial_index: u64) -> TrialOutcome {
        let n = self.rules.len();
        let mut latency = vec![None; n];
        let mut cursors = vec![0usize; n];
        let mut probs = vec![0.0f64; n];
        let mut pending: Vec<usize> = (0..n).collect();
        let mut t = 1u64;
        let mut last = 0u64;

        while !pending.is_empty() && t <= self.slot_cap {
            let mut horizon = u64::MAX;
            let mut ones = 0usize;
            let mut lone = usize::MAX;
            let mut random = false;
            for &i in &pending {
                let (prob, next) = self.rules[i].at(&mut cursors[i], t);
                probs[i] = prob;
                horizon = horizon.min(next);
                if prob >= 1.0 {
                    ones += 1;
                    lone = i;
                } else if prob > 0.0 {
                    random = true;
                }
            }

            let winner = if random {
                let mut count = 0usize;
                let mut who = usize::MAX;
                for &i in &pending {
                    let prob = probs[i];
                    let transmits =
                        prob >= 1.0 || (prob > 0.0 && cell_uniform(self.seed, trial_index, i as u64, t) < prob);
                    if transmits {
                        count += 1;
                        who = i;
                    }
                }
                (count == 1).then_some(who)
            } else if ones == 1 {
                Some(lone)
            } else {
                // deterministic collision or idle until some rule changes
                let stop = horizon.min(self.slot_cap.saturating_add(1));
                last = stop - 1;
                t = stop;
                continue;
            };

            if let Some(i) = winner {
                latency[i] = Some(t);
                pending.retain(|&j| j != i);
            }
            last = t;
            t += 1;
        }

        let censored = latency.iter().map(Option::is_none).collect();
        TrialOutcome {
            latency,
            censored,
            slots_run: last,
        }
    }
}

/// Full record of a slot-by-slot game.
#[derive(Clone, Debug, PartialEq)]
pub struct TracedTrial {
    pub outcome: TrialOutcome,
    pub histories: Vec<PersonalHistory>,
    pub slots: Vec<SlotOutcome>,
}

/// Reference implementation: walks every slot, queries each decision rule
/// through [`decision_probability`] and records complete histories.
///
/// Produces the same outcome as [`super::run_trial`] (the draws coincide),
/// at a cost linear in the number of slots played.
pub fn run_trial_traced(config: &GameConfig, trial_index: u64) -> Result<TracedTrial> {
    let specs = config
        .profile()
        .iter()
        .map(|s| s.covering(config.slot_cap()))
        .collect::<Result<Vec<_>>>()?;
    let n = specs.len();
    let mut histories = vec![PersonalHistory::new(); n];
    let mut latency = vec![None; n];
    let mut slots = Vec::new();
    let mut t = 1u64;

    while histories.iter().any(PersonalHistory::is_pending) && t <= config.slot_cap() {
        let mut attempts = vec![false; n];
        for i in 0..n {
            if !histories[i].is_pending() {
                continue;
            }
            let prob = decision_probability(&specs[i], &histories[i], t)?;
            attempts[i] = if prob > 0.0 && prob < 1.0 {
                cell_uniform(config.seed(), trial_index, i as u64, t) < prob
            } else {
                prob >= 1.0
            };
        }
        let transmitters: Vec<usize> = (0..n).filter(|&i| attempts[i]).collect();
        let outcome = SlotOutcome::resolve(&transmitters);
        for i in 0..n {
            if histories[i].is_pending() {
                let won = outcome == SlotOutcome::Success(i);
                histories[i].record(attempts[i], won);
                if won {
                    latency[i] = Some(t);
                }
            }
        }
        slots.push(outcome);
        t += 1;
    }

    let censored = latency.iter().map(Option::is_none).collect();
    Ok(TracedTrial {
        outcome: TrialOutcome {
            latency,
            censored,
            slots_run: t - 1,
        },
        histories,
        slots,
    })
}
