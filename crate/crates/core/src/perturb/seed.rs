use std::hash::Hasher;

use fnv::FnvHasher;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifies the random stream for one (document, neighbor code) pair.
///
/// The stream seed is FNV-1a 64 over `global_seed` (little-endian), a `0xFF`
/// byte, the UTF-8 document id, another `0xFF`, and the UTF-8 code. `0xFF`
/// never occurs in UTF-8, so distinct (id, code) pairs cannot collide by
/// concatenation. The stream itself is ChaCha8.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedContext {
    pub global_seed: u64,
    pub doc_id: String,
    pub code: String,
}

impl SeedContext {
    pub fn new(global_seed: u64, doc_id: impl Into<String>, code: impl Into<String>) -> Self {
        SeedContext { global_seed, doc_id: doc_id.into(), code: code.into() }
    }

    pub fn stream_seed(&self) -> u64 {
        let mut h = FnvHasher::default();
        h.write(&self.global_seed.to_le_bytes());
        h.write(&[0xFF]);
        h.write(self.doc_id.as_bytes());
        h.write(&[0xFF]);
        h.write(self.code.as_bytes());
        h.finish()
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.stream_seed())
    }
}

/// Seeded RNG for sampling steps that are not tied to one document.
pub fn sampling_rng(global_seed: u64, purpose: &str) -> ChaCha8Rng {
    SeedContext::new(global_seed, "", purpose).rng()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_seed_is_pinned() {
        // FNV-1a of the byte layout above; frozen so seeds stay stable
        // across releases and platforms.
        let a = SeedContext::new(7, "doc1", "T_AShuff").stream_seed();
        let b = SeedContext::new(7, "doc1", "T_AShuff").stream_seed();
        assert_eq!(a, b);
        assert_eq!(a, fnv_reference(7, "doc1", "T_AShuff"));
    }

    #[test]
    fn separator_prevents_concatenation_collisions() {
        let a = SeedContext::new(0, "ab", "c").stream_seed();
        let b = SeedContext::new(0, "a", "bc").stream_seed();
        assert_ne!(a, b);
    }

    fn fnv_reference(seed: u64, id: &str, code: &str) -> u64 {
        let mut bytes = seed.to_le_bytes().to_vec();
        bytes.push(0xFF);
        bytes.extend_from_slice(id.as_bytes());
        bytes.push(0xFF);
        bytes.extend_from_slice(code.as_bytes());
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }
}
