//! Seeded, counter-based random streams.
//!
//! Every consumer of randomness asks for a `(seed, domain, index)` stream. The
//! ChaCha key is derived from `seed` and `domain`; `index` selects the ChaCha
//! stream, so two streams never overlap and the draw sequence of one stream
//! does not depend on how many others exist or in which thread they run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Independent purposes that draw from the same master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Domain {
    Positions = 1,
    GraphRows = 2,
    Spikes = 3,
    Replicas = 4,
    Heuristic = 5,
    SpotCheck = 6,
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream(seed: u64, domain: Domain, index: u64) -> StreamRng {
    let mut key = [0u8; 32];
    let mut state = mix64(seed ^ mix64(domain as u64));
    for chunk in key.chunks_mut(8) {
        state = mix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Derive a child seed, e.g. one per replica of an experiment.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(mix64(master), |acc, &t| mix64(acc ^ mix64(t.wrapping_add(0x632B_E59B_D9B4_E019))))
}

/// Unit-rate exponential variate.
pub fn unit_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // random::<f64>() lies in [0, 1); 1 - u lies in (0, 1].
    let u: f64 = rng.random();
    -(1.0 - u).ln()
}
