//! Seeded, label-derived randomness. Every sampling call takes an explicit
//! RNG; this module only builds them.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

pub type Rng = ChaCha20Rng;

/// A ChaCha20 stream keyed by SHAKE256(domain ‖ seed ‖ label).
pub fn derive(seed: u64, label: &str) -> Rng {
    let mut h = Shake256::default();
    h.update(b"ktaa-rng-v1");
    h.update(&seed.to_le_bytes());
    h.update(&(label.len() as u64).to_le_bytes());
    h.update(label.as_bytes());
    let mut key = [0u8; 32];
    h.finalize_xof().read(&mut key);
    ChaCha20Rng::from_seed(key)
}

pub fn from_key(key: [u8; 32]) -> Rng {
    ChaCha20Rng::from_seed(key)
}
