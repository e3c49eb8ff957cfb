//! Named deterministic random streams.
//!
//! A stream is identified by the master seed and a textual label such as
//! `inject/adder_n4/reorder/0`. The label is hashed with SHA-256, so
//! streams are independent of each other and of execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Bumped whenever the derivation changes; part of every stream's hash.
pub const STREAM_VERSION: &str = "qci-stream-v1";

fn digest(master: u64, label: &str) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(STREAM_VERSION.as_bytes());
    h.update([0]);
    h.update(master.to_le_bytes());
    h.update([0]);
    h.update(label.as_bytes());
    h.finalize().into()
}

pub fn derive_seed(master: u64, label: &str) -> u64 {
    let d = digest(master, label);
    u64::from_le_bytes(d[..8].try_into().unwrap())
}

pub fn stream(master: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(digest(master, label))
}
