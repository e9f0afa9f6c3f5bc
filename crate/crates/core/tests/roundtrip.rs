use std::fmt::Debug;

use serde::de::DeserializeOwned;
use serde::Serialize;

use contention::analysis::{
    bound_report, deadline_comparison, default_z_grid, feasibility, persistent_distribution, solve_expectations,
    Semantics,
};
use contention::engine::{empirical_distribution, monte_carlo, GameConfig};
use contention::{Probability, RationalParam, Schedule};

fn round_trip<T: Serialize + DeserializeOwned + PartialEq + Debug>(value: &T) {
    let text = serde_json::to_string(value).unwrap();
    let back: T = serde_json::from_str(&text).unwrap();
    assert_eq!(&back, value, "{text}");
}

fn c() -> RationalParam {
    "11/10".parse().unwrap()
}

fn p() -> Probability {
    Probability::new(0.75).unwrap()
}

#[test]
fn every_report_round_trips() {
    round_trip(&feasibility(&c(), p()).unwrap());
    round_trip(&feasibility(&"7/5".parse().unwrap(), Probability::new(0.3).unwrap()).unwrap());
    round_trip(&bound_report(&c(), p(), Some(3), 12).unwrap());
    round_trip(&persistent_distribution(&c(), p(), 250).unwrap());
    round_trip(&deadline_comparison(&c(), p(), 14, &default_z_grid()).unwrap());
    for sem in [Semantics::Literal, Semantics::PaperSeries] {
        round_trip(&solve_expectations(&c(), p(), sem, 40).unwrap());
    }
    let game = GameConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/all_p.json")).unwrap();
    round_trip(&monte_carlo(&game, 2000, 1).unwrap());
    round_trip(&empirical_distribution(&game, 2000, 1).unwrap());
}

#[test]
fn huge_schedule_entries_survive() {
    // x_k exceeds u64 well before k = 500 at c = 2
    let sched = Schedule::build("2".parse().unwrap(), 500).unwrap();
    let text = serde_json::to_string(&sched).unwrap();
    let back: Schedule = serde_json::from_str(&text).unwrap();
    assert_eq!(back, sched);
    assert!(text.contains('"'));
}

#[test]
fn sample_configs_load() {
    for name in ["all_p", "persistent_deviator", "deadline_deviator", "constant_third"] {
        let path = format!("{}/data/{name}.json", env!("CARGO_MANIFEST_DIR"));
        let cfg = GameConfig::load(&path).unwrap();
        assert_eq!(cfg.n(), 3, "{name}");
        let again = GameConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(again.to_json().unwrap(), cfg.to_json().unwrap());
    }
}
