//! Counter-based uniform draws.
//!
//! Each draw is a pure function of `(seed, trial, player, slot)`, so trials
//! can run in any order or on any number of threads and still see the same
//! coin flips. Slots where a player's probability is 0 or 1 simply never
//! consume their draw.

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Raw 64-bit word for one `(seed, trial, player, slot)` cell.
#[inline]
pub fn cell_word(seed: u64, trial: u64, player: u64, slot: u64) -> u64 {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ trial);
    h = splitmix64(h ^ player.wrapping_mul(0xD6E8_FEB8_6659_FD93));
    splitmix64(h ^ slot)
}

/// Uniform in `[0, 1)` with 53 bits of resolution.
#[inline]
pub fn cell_uniform(seed: u64, trial: u64, player: u64, slot: u64) -> f64 {
    (cell_word(seed, trial, player, slot) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
