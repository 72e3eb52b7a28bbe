//! Counter-based random streams.
//!
//! A stream is keyed by `(seed, stream_index)`; the ChaCha block counter
//! advances with every draw, so any unit of work that owns its own stream
//! index reproduces the same draws no matter which thread runs it or in what
//! order.

use std::f64::consts::TAU;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::matcore::C64;

/// Reproducible random stream keyed by `(seed, stream_index)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_index: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_index);
        RngStream {
            seed,
            stream_index,
            inner,
        }
    }

    /// Stream for work unit `unit` of a campaign tagged `tag`.
    ///
    /// Tags occupy the high 24 bits so different campaigns driven by one seed
    /// never share a stream.
    pub fn for_unit(seed: u64, tag: u32, unit: u64) -> Self {
        debug_assert!(unit < (1 << 40));
        RngStream::new(seed, ((tag as u64) << 40) | unit)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1]`.
    pub fn uniform_open0(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard complex normal (`E|z|^2 = 1`) from one Box–Muller pair.
    pub fn complex_normal(&mut self) -> C64 {
        let r = (-self.uniform_open0().ln()).sqrt();
        let theta = TAU * self.uniform();
        C64::new(r * theta.cos(), r * theta.sin())
    }

    /// Real standard normal (the cosine branch of Box–Muller).
    pub fn normal(&mut self) -> f64 {
        let r = (-2.0 * self.uniform_open0().ln()).sqrt();
        r * (TAU * self.uniform()).cos()
    }

    /// Uniform phase `e^{iα}`.
    pub fn phase(&mut self) -> C64 {
        C64::from_polar(1.0, TAU * self.uniform())
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        // rejection to avoid modulo bias
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }
}
