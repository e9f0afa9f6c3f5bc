//! Slotted multiple-access game and seeded Monte Carlo estimation.
//!
//! In every slot each pending player transmits independently with the
//! probability its decision rule prescribes. A lone transmitter succeeds and
//! leaves; two or more collide; nobody transmitting leaves the channel idle.
//! Trials stop once every player is done or the slot cap is reached, in which
//! case the remaining players are censored.

mod stats;
mod trial;

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ContentionError, Result};
use crate::protocols::{ProtocolConfig, ProtocolSpec};

pub use stats::{EmpiricalPmf, LatencyStats};
pub use trial::{run_trial_traced, TracedTrial};

use trial::PreparedGame;

pub const DEFAULT_SLOT_CAP: u64 = 1_000_000;

/// One game instance: protocol profile, seed and censoring horizon.
#[derive(Clone, Debug, PartialEq)]
pub struct GameConfig {
    profile: Vec<ProtocolSpec>,
    seed: u64,
    slot_cap: u64,
}

impl GameConfig {
    pub fn new(profile: Vec<ProtocolSpec>, seed: u64, slot_cap: u64) -> Result<Self> {
        if profile.is_empty() {
            return Err(ContentionError::Config("a game needs at least one player".into()));
        }
        if slot_cap == 0 {
            return Err(ContentionError::Config("slot_cap must be >= 1".into()));
        }
        Ok(GameConfig {
            profile,
            seed,
            slot_cap,
        })
    }

    /// `n` copies of the same protocol.
    pub fn uniform(spec: ProtocolSpec, n: usize, seed: u64, slot_cap: u64) -> Result<Self> {
        GameConfig::new(vec![spec; n], seed, slot_cap)
    }

    pub fn n(&self) -> usize {
        self.profile.len()
    }

    pub fn profile(&self) -> &[ProtocolSpec] {
        &self.profile
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn slot_cap(&self) -> u64 {
        self.slot_cap
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_slot_cap(mut self, slot_cap: u64) -> Result<Self> {
        if slot_cap == 0 {
            return Err(ContentionError::Config("slot_cap must be >= 1".into()));
        }
        self.slot_cap = slot_cap;
        Ok(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GameConfigFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        GameConfig::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&GameConfigFile::from(self))?)
    }
}

fn default_slot_cap() -> u64 {
    DEFAULT_SLOT_CAP
}

/// On-disk game description:
/// `{"players": [...], "seed": 7, "slot_cap": 1000000}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameConfigFile {
    pub players: Vec<ProtocolConfig>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_slot_cap")]
    pub slot_cap: u64,
}

impl TryFrom<GameConfigFile> for GameConfig {
    type Error = ContentionError;

    fn try_from(file: GameConfigFile) -> Result<Self> {
        let profile = file
            .players
            .into_iter()
            .map(ProtocolSpec::try_from)
            .collect::<Result<Vec<_>>>()?;
        GameConfig::new(profile, file.seed, file.slot_cap)
    }
}

impl From<&GameConfig> for GameConfigFile {
    fn from(cfg: &GameConfig) -> Self {
        GameConfigFile {
            players: cfg.profile.iter().map(ProtocolConfig::from).collect(),
            seed: cfg.seed,
            slot_cap: cfg.slot_cap,
        }
    }
}

/// Result of one slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlotOutcome {
    Success(usize),
    Collision,
    Idle,
}

impl SlotOutcome {
    pub fn resolve(transmitters: &[usize]) -> SlotOutcome {
        match transmitters {
            [] => SlotOutcome::Idle,
            [only] => SlotOutcome::Success(*only),
            _ => SlotOutcome::Collision,
        }
    }
}

/// Per-player latencies of one game; `None` means censored at the cap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub latency: Vec<Option<u64>>,
    pub censored: Vec<bool>,
    pub slots_run: u64,
}

/// Plays trial `trial_index`; the draws depend only on `(seed, trial_index)`.
pub fn run_trial(config: &GameConfig, trial_index: u64) -> Result<TrialOutcome> {
    Ok(PreparedGame::new(config)?.run(trial_index))
}

/// Runs trials `0..trials` on the current rayon pool, returned in index order.
pub fn simulate(config: &GameConfig, trials: u64) -> Result<Vec<TrialOutcome>> {
    if trials == 0 {
        return Err(ContentionError::InvalidArguments("trials must be >= 1".into()));
    }
    let game = PreparedGame::new(config)?;
    Ok((0..trials).into_par_iter().map(|i| game.run(i)).collect())
}

/// [`simulate`] on a dedicated pool of `threads` workers.
pub fn simulate_with_threads(config: &GameConfig, trials: u64, threads: usize) -> Result<Vec<TrialOutcome>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| ContentionError::Config(format!("thread pool: {e}")))?;
    pool.install(|| simulate(config, trials))
}

fn check_focus(config: &GameConfig, focus_player: usize) -> Result<()> {
    if focus_player >= config.n() {
        return Err(ContentionError::InvalidArguments(format!(
            "focus player {focus_player} out of range for {} players",
            config.n()
        )));
    }
    Ok(())
}

pub fn monte_carlo(config: &GameConfig, trials: u64, focus_player: usize) -> Result<LatencyStats> {
    check_focus(config, focus_player)?;
    let outcomes = simulate(config, trials)?;
    Ok(LatencyStats::from_outcomes(&outcomes, focus_player, config.slot_cap()))
}

pub fn monte_carlo_with_threads(
    config: &GameConfig,
    trials: u64,
    focus_player: usize,
    threads: usize,
) -> Result<LatencyStats> {
    check_focus(config, focus_player)?;
    let outcomes = simulate_with_threads(config, trials, threads)?;
    Ok(LatencyStats::from_outcomes(&outcomes, focus_player, config.slot_cap()))
}

pub fn empirical_distribution(config: &GameConfig, trials: u64, focus_player: usize) -> Result<EmpiricalPmf> {
    check_focus(config, focus_player)?;
    let outcomes = simulate(config, trials)?;
    Ok(EmpiricalPmf::from_outcomes(&outcomes, focus_player))
}

/// Writes `trial_index,player,latency,censored` rows; censored latencies are empty.
pub fn write_samples_csv<W: Write>(outcomes: &[TrialOutcome], writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["trial_index", "player", "latency", "censored"])?;
    for (trial, o) in outcomes.iter().enumerate() {
        for (player, lat) in o.latency.iter().enumerate() {
            out.write_record([
                trial.to_string(),
                player.to_string(),
                lat.map(|v| v.to_string()).unwrap_or_default(),
                o.censored[player].to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}
