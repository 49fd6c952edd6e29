//! Seed derivation and random streams.
//!
//! Every random quantity is drawn from a ChaCha20 generator keyed by a 64-bit
//! seed and addressed by a stream id, so draws do not depend on evaluation
//! order. Stream ids:
//!
//! * link between nodes with codes `a < b`: `(a << 16) | b`, where users
//!   have code `u` (their index in `[A1, B1, A2, ...]`), the eavesdropper
//!   `0xFFFE` and the IRS `0xFFFF`. A user-IRS vector consumes its stream
//!   element by element, so the first `L` entries of a longer draw equal a
//!   draw of length `L`.
//! * [`INIT_PHASE_STREAM`] for the initial random phases of the optimizer,
//! * [`RANDOMIZATION_STREAM`] for Gaussian randomization,
//! * [`BASELINE_PHASE_STREAM`] for the random-phase baseline.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub const EVE_CODE: u64 = 0xFFFE;
pub const IRS_CODE: u64 = 0xFFFF;
pub const INIT_PHASE_STREAM: u64 = 1 << 40;
pub const RANDOMIZATION_STREAM: u64 = 2 << 40;
pub const BASELINE_PHASE_STREAM: u64 = 3 << 40;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a over a string, used to fold labels into seeds.
pub fn hash_str(s: &str) -> u64 {
    s.bytes().fold(0xCBF2_9CE4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// Folds a list of words into one seed.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(mix64(base), |acc, &p| mix64(acc ^ mix64(p)))
}

/// Seed of one Monte Carlo realization.
pub fn realization_seed(base: u64, realization: u64) -> u64 {
    derive_seed(base, &[hash_str("realization"), realization])
}

/// Stream id of the link between two node codes (order-free).
pub fn link_stream(a: u64, b: u64) -> u64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    (lo << 16) | hi
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
