//! Deterministic random-number streams.
//!
//! Every source of randomness in the pipeline derives from a single master
//! seed through named streams, so any artifact can be regenerated from the
//! (master seed, purpose, index) triple recorded in its manifest.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

/// A named, indexed random stream derived from the master seed.
pub fn stream(master: u64, purpose: &str, index: u64) -> ChaCha12Rng {
    ChaCha12Rng::from_seed(stream_key(master, purpose, index))
}

/// The 32-byte ChaCha key for a stream; its first 8 bytes double as the
/// compact sub-seed recorded in dataset records.
pub fn stream_key(master: u64, purpose: &str, index: u64) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update([0x1f]);
    h.update(purpose.as_bytes());
    h.update([0x1f]);
    h.update(index.to_le_bytes());
    h.finalize().into()
}

/// Compact u64 form of a stream identity, for provenance records.
pub fn stream_id(master: u64, purpose: &str, index: u64) -> u64 {
    let key = stream_key(master, purpose, index);
    u64::from_le_bytes(key[..8].try_into().expect("8 bytes"))
}

/// Rebuild the RNG for a record from its stored compact sub-seed.
pub fn stream_from_id(id: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(id)
}
