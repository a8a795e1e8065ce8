//! Deterministic mixing used to derive per-decision randomness.

/// SplitMix64 finalizer.
pub fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive hash of a word sequence under `seed`.
pub fn mix(seed: u64, words: impl IntoIterator<Item = u64>) -> u64 {
    let mut h = splitmix(seed);
    for w in words {
        h = splitmix(h ^ w);
    }
    h
}
