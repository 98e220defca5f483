//! Seed derivation.
//!
//! Every run takes one master seed; per-component seeds (split, bootstrap of
//! model i, training of model i, ...) are derived from it with a fixed mixing
//! function so that changing the master seed changes everything while two runs
//! with the same master seed are bit-identical.

/// Fixed role constants. The numeric values are arbitrary but frozen: changing
/// them changes every derived stream.
pub mod role {
    pub const SPLIT: u64 = 0x01;
    pub const RUN: u64 = 0x02;
    pub const SYNTH: u64 = 0x03;
    /// Bootstrap resample for model `i` uses `BOOTSTRAP + i`.
    pub const BOOTSTRAP: u64 = 0x10;
    /// Training stream for model `i` uses `TRAIN + i`.
    pub const TRAIN: u64 = 0x20;
}

/// Derives a sub-seed from `(master, salt)` via splitmix64.
#[must_use]
pub fn mix(master: u64, salt: u64) -> u64 {
    // splitmix64 finalizer over the combined state
    let mut z = master
        .wrapping_add(salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
