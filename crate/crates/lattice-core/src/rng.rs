//! Counter-based random streams.
//!
//! Every stream is a ChaCha8 generator whose 256-bit key is a hash of a
//! tuple of integers, so the numbers drawn for e.g. (seed, site, cell,
//! direction) do not depend on which other streams were used or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream roles, kept distinct so different consumers never share keys.
pub mod role {
    pub const ARROW: u64 = 0xA110;
    pub const CLOCK_BIRTH: u64 = 0xB1;
    pub const CLOCK_DEATH: u64 = 0xDE;
    pub const PARTICLE: u64 = 0x9A;
    pub const SAMPLER: u64 = 0x5A;
    pub const INITIAL: u64 = 0x1417;
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic generator for the key `parts`.
pub fn keyed(parts: &[u64]) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    let mut acc = 0x243F_6A88_85A3_08D3u64 ^ parts.len() as u64;
    for &p in parts {
        acc = splitmix(acc ^ splitmix(p));
    }
    for (i, chunk) in seed.chunks_mut(8).enumerate() {
        acc = splitmix(acc.wrapping_add(i as u64));
        chunk.copy_from_slice(&acc.to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// Signed integers enter keys through this bijection.
pub fn zigzag(x: i64) -> u64 {
    ((x << 1) ^ (x >> 63)) as u64
}
