//! Age-based contention resolution on a slotted channel.
//!
//! Players arriving together share a channel; a slot succeeds when exactly
//! one pending player transmits. Under `P(c, p)` a player transmits with
//! probability `p` at the non-trivial times `s_k = sum_{j<=k} floor(2 c^j)`
//! and with probability 1 otherwise.

pub mod analysis;
pub mod cli;
pub mod engine;
pub mod error;
pub mod probability;
pub mod protocols;
pub mod rng;
pub mod schedule;

pub use error::{ContentionError, Result};
pub use probability::Probability;
pub use schedule::{RationalParam, Schedule};
