//! Deterministic seed derivation.
//!
//! Every randomized stage draws from its own ChaCha stream whose seed is a
//! splitmix64 hash of the master seed and a stage label. Derived streams are
//! therefore independent of evaluation order, which keeps results identical
//! no matter how work is scheduled.

/// splitmix64 finalizer; good avalanche, cheap, stable across platforms.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derive a child seed from `seed` and one label.
pub fn derive(seed: u64, label: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(label))
}

/// Derive a child seed from `seed` and two labels (e.g. generation and pair).
pub fn derive2(seed: u64, a: u64, b: u64) -> u64 {
    derive(derive(seed, a), b)
}
