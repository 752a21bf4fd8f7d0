//! Reproducible random streams.
//!
//! Every trial draws from its own ChaCha8 stream keyed by
//! `(master seed, trial index)`, so parallel scheduling never changes a
//! result. Normal variates come from the Box-Muller transform, which
//! consumes a fixed number of uniforms per variate.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A ChaCha8 stream for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A 64-bit seed derived from `(master, index)`; used to record per-trial
/// seeds that regenerate the trial on their own.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    stream_rng(master, index.wrapping_add(1)).next_u64()
}

/// Uniform on `[0, 1)` with 53 random bits.
pub fn uniform<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform index in `0..n` (multiply-shift; bias is below 2^-32 for the
/// sizes used here).
pub fn index_below<R: RngCore>(rng: &mut R, n: usize) -> usize {
    ((rng.next_u64() as u128 * n as u128) >> 64) as usize
}

/// Standard normal variates, two per pair of uniforms.
pub struct NormalSampler<R> {
    rng: R,
    spare: Option<f64>,
}

impl<R: RngCore> NormalSampler<R> {
    pub fn new(rng: R) -> Self {
        NormalSampler { rng, spare: None }
    }

    pub fn sample(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] keeps the logarithm finite.
        let u1 = 1.0 - uniform(&mut self.rng);
        let u2 = uniform(&mut self.rng);
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn rng_mut(&mut self) -> &mut R {
        &mut self.rng
    }
}
