//! Deterministic seed splitting.
//!
//! Every random stream in an experiment is keyed by
//! `(master seed, role, index)` through a SplitMix64 finalizer, so parallel
//! execution order cannot change results and any single row can be re-run
//! in isolation.

/// Which component of an experiment a derived stream feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Reservoir = 1,
    Block = 2,
    InitialCondition = 3,
    G1Samples = 4,
    Perturbation = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derived ChaCha8 seed for `(master, role, index)`.
pub fn subseed(master: u64, role: Role, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(((role as u64) << 32) ^ index))
}
