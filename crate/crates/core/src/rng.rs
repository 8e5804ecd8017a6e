//! Deterministic random source.
//!
//! Every draw comes from ChaCha8 (`rand_chacha`), whose output is specified
//! bit-for-bit and independent of platform endianness or word size. A run
//! derives one independent ChaCha stream per purpose from its master seed, so
//! extra draws in one phase never shift the sequence seen by another.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Purpose tag selecting an independent stream under a master seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stream {
    Placement,
    Election,
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Placement => 1,
            Stream::Election => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Rng {
    inner: ChaCha8Rng,
}

impl Rng {
    /// Stream 0 of the given seed.
    pub fn seeded(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The `purpose` stream of `master_seed`.
    pub fn stream(master_seed: u64, purpose: Stream) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(purpose.id());
        Self { inner }
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    pub fn next_unit(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }
}
