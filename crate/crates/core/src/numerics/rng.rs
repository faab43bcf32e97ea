//! Seeded, splittable random streams.
//!
//! A stream is identified by `(seed, stream_id)` and backed by ChaCha8, whose
//! 64-bit stream selector gives independent sequences under one key. Child
//! streams re-key from the parent identity, so any trial in a Monte-Carlo run
//! can be regenerated in isolation from its index path.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Fresh stream numbered `index` under this stream's identity. Does not
    /// consume or depend on the parent's sampling position.
    pub fn child(&self, index: u64) -> RngStream {
        let key = splitmix64(self.seed ^ splitmix64(self.stream_id.wrapping_add(0xA5A5_A5A5)));
        RngStream::new(key, index)
    }

    /// Child reached by following `path` one index at a time.
    pub fn descend(&self, path: &[u64]) -> RngStream {
        path.iter().fold(self.clone(), |s, &i| s.child(i))
    }

    /// One standard normal draw (unit variance).
    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform_index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}
