//! Counter-based random streams.
//!
//! A stream is keyed by `(master_seed, lane)` and selects ChaCha stream number
//! `stream_id`, so every draw is a pure function of the key, the stream id and
//! the draw index. Replicate `i` of an experiment uses `stream_id = i`; lanes
//! separate independent consumers inside one replicate (step times vs noise).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Lane used by noise oracles, distinct from the default step-time lane.
pub const NOISE_LANE: u64 = 1;

#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    lane: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self::with_lane(master_seed, stream_id, 0)
    }

    fn with_lane(master_seed: u64, stream_id: u64, lane: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&lane.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(stream_id);
        Self {
            master_seed,
            stream_id,
            lane,
            rng,
        }
    }

    /// A fresh stream for the same replicate on a different lane.
    pub fn fork(&self, lane: u64) -> Self {
        Self::with_lane(self.master_seed, self.stream_id, lane)
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn lane(&self) -> u64 {
        self.lane
    }

    /// Uniform draw on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform draw on `[lo, hi]`.
    #[inline]
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Number of 32-bit words consumed so far.
    pub fn position(&self) -> u128 {
        self.rng.get_word_pos()
    }
}

/// SplitMix64 finalizer, used to derive seeds for independent realizations.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
