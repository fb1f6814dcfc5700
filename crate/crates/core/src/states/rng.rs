//! Reproducible parallel random streams.
//!
//! [`RngStream`] wraps a counter-based ChaCha generator: the value sequence
//! is a pure function of (seed, stream_id), streams with distinct ids are
//! independent, and any worker count partitions work without coordination.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Clone, Debug)]
pub struct RngStream {
    rng: ChaCha8Rng,
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream {
            rng,
            seed,
            stream_id,
        }
    }

    #[inline]
    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform in (0, 1) (open, so logs and divisions are safe).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.sample(Open01)
    }

    /// Uniform in [-1, 1).
    #[inline]
    pub fn symmetric(&mut self) -> f64 {
        2.0 * self.rng.gen::<f64>() - 1.0
    }

    #[inline]
    pub fn angle(&mut self) -> f64 {
        2.0 * std::f64::consts::PI * self.rng.gen::<f64>()
    }
}
