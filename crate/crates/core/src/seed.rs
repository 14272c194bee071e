//! Deterministic RNG derivation.
//!
//! Every random quantity in a run derives from `(master seed, stream, index)`,
//! so Monte Carlo trials can execute in any order (or concurrently) and still
//! reproduce bit-identical results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named sub-streams drawn from one master seed.
#[derive(Clone, Copy, Debug)]
pub enum Stream {
    Keys = 1,
    Wiretap = 2,
    Hash = 3,
    PrivacyAmp = 4,
    Message = 5,
    AttackRandomTag = 6,
    AttackForgery = 7,
    Instance = 8,
    AttackAuth = 9,
}

/// splitmix64 step, used only to expand seed material.
fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// ChaCha8 RNG for `(master, stream, index)`.
pub fn derive_rng(master: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    let mut state = master ^ 0x243f6a8885a308d3;
    let mut seed = [0u8; 32];
    let a = splitmix(&mut state);
    let mut mix = a ^ (stream as u64).wrapping_mul(0x9e3779b97f4a7c15) ^ index.rotate_left(17);
    for chunk in seed.chunks_mut(8) {
        let v = splitmix(&mut mix);
        chunk.copy_from_slice(&v.to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}
