//! Monte Carlo run of a game config, with latency statistics for every
//! player and optional per-trial CSV samples.
//!
//! cargo run --release --example simulate -- data/persistent_deviator.json 20000 samples.csv

use std::fs::File;

use contention::engine::{simulate, write_samples_csv, GameConfig, LatencyStats};

fn main() -> contention::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/all_p.json").to_string());
    let trials: u64 = args.next().map(|v| v.parse().expect("trials")).unwrap_or(20_000);
    let config = GameConfig::load(&path)?;

    let outcomes = simulate(&config, trials)?;
    println!(
        "{path}: {trials} trials, seed {}, cap {}",
        config.seed(),
        config.slot_cap()
    );
    for (player, spec) in config.profile().iter().enumerate() {
        let s = LatencyStats::from_outcomes(&outcomes, player, config.slot_cap());
        println!(
            "  player {player} {:<28} mean {:>10.2} +- {:<8.2} median {:>6} q99 {:>8} censored {}",
            spec.label(),
            s.mean,
            s.ci95_halfwidth,
            s.median,
            s.q99,
            s.censored_count
        );
    }
    if let Some(out) = args.next() {
        write_samples_csv(&outcomes, File::create(&out)?)?;
        println!("samples written to {out}");
    }
    Ok(())
}
