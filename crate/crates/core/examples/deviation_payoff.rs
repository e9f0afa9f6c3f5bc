//! Whether deviating from P(c, p) pays: simulated latency of player 2 when
//! it follows the protocol, transmits persistently, or switches to always
//! transmitting after a deadline.
//!
//! P(c, p) only makes persistent and deadline deviations unprofitable. It is
//! not an equilibrium, and the constant-probability row shows a deviation
//! that does pay.
//!
//! cargo run --release --example deviation_payoff

use contention::engine::{monte_carlo, GameConfig};
use contention::protocols::{PreRule, ProtocolSpec};
use contention::{Probability, RationalParam, Schedule};
use std::sync::Arc;

fn main() -> contention::Result<()> {
    let c = RationalParam::new(11, 10)?;
    let p = Probability::new(0.75)?;
    let honest = ProtocolSpec::age_based(c.clone(), p)?;
    let follow = PreRule::FollowAgeBased {
        schedule: Arc::new(Schedule::build(c, 64)?),
        p,
    };
    let cap = 200_000;
    let trials = 20_000;

    let candidates = [
        ("P(11/10, 3/4)", honest.clone()),
        ("persistent", ProtocolSpec::persistent()),
        ("deadline 14, P before", ProtocolSpec::deadline(14, follow.clone())?),
        ("deadline 50, P before", ProtocolSpec::deadline(50, follow)?),
        ("constant 1/2", ProtocolSpec::constant(Probability::new(0.5)?)),
    ];
    println!("{trials} trials, slot cap {cap}; censored trials count at the cap");
    for (name, deviation) in candidates {
        let config = GameConfig::new(vec![honest.clone(), honest.clone(), deviation], 11, cap)?;
        let s = monte_carlo(&config, trials, 2)?;
        println!(
            "{name:<24} mean {:>10.1}{} median {:>6} q99 {:>9} censored {}",
            s.mean,
            if s.mean_is_lower_bound { "+" } else { " " },
            s.median,
            s.q99,
            s.censored_count
        );
    }
    Ok(())
}
