//! Counter-based random streams keyed by `(master seed, dimension, replicate)`.
//!
//! ChaCha20 exposes a 64-bit stream id and a 128-bit word counter, so any
//! entry of any replicate can be regenerated without replaying the others.

use rand::RngCore;
use rand_chacha::ChaCha20Rng;
use rand::SeedableRng;

/// Words of keystream consumed per matrix entry (two `u64` draws).
pub const WORDS_PER_ENTRY: u128 = 4;

/// Independent families of streams derived from one master seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    MatrixEntries,
    GaussianAnalytic,
    SelfCheck,
}

impl Domain {
    fn tag(self) -> u64 {
        match self {
            Domain::MatrixEntries => 0x6d61_7472_6978_0001,
            Domain::GaussianAnalytic => 0x6761_665f_7365_0002,
            Domain::SelfCheck => 0x6368_6563_6b5f_0003,
        }
    }
}

/// Identifies one replicate's stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub master_seed: u64,
    pub replicate_index: u64,
}

impl StreamKey {
    pub fn new(master_seed: u64, replicate_index: u64) -> Self {
        Self {
            master_seed,
            replicate_index,
        }
    }

    /// Stream for `domain`; `dimension` separates replicates of different sizes.
    pub fn stream(&self, domain: Domain, dimension: usize) -> ChaCha20Rng {
        assert!(self.replicate_index < 1 << 40, "replicate index exceeds 2^40");
        let mut rng = ChaCha20Rng::from_seed(expand_seed(self.master_seed ^ domain.tag()));
        rng.set_stream(((dimension as u64) << 40) | self.replicate_index);
        rng
    }
}

/// Positions `rng` at the first word of entry `entry_index`.
pub fn seek_entry(rng: &mut ChaCha20Rng, entry_index: u64) {
    rng.set_word_pos(WORDS_PER_ENTRY * entry_index as u128);
}

/// SplitMix64 expansion of a 64-bit seed into a ChaCha key.
fn expand_seed(seed: u64) -> [u8; 32] {
    let mut state = seed;
    let mut out = [0u8; 32];
    for chunk in out.chunks_exact_mut(8) {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        chunk.copy_from_slice(&z.to_le_bytes());
    }
    out
}

/// Uniform draw on `(0, 1]` with 53 random bits.
#[inline]
pub fn open_unit(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}
