use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{invalid, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A deterministic stream of pseudo-random numbers.
///
/// The generator is xoshiro256++ whose 256-bit state is filled from the
/// 64-bit seed by four successive SplitMix64 outputs. Uniform doubles take
/// the top 53 bits of each output: `(x >> 11) * 2^-53`, which lies in
/// `[0, 1)`. The same seed gives the same sequence on every platform.
///
/// Substreams are keyed by `(seed, k)`: the key is folded into a fresh
/// seed `splitmix64(seed ^ splitmix64(k))` so that replication `k` of a
/// study can be replayed without generating replications `0..k`.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: Xoshiro256PlusPlus,
    seed: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
            seed,
        }
    }

    pub fn substream(seed: u64, k: u64) -> Self {
        Self::new(splitmix64(seed ^ splitmix64(k)))
    }

    /// The seed this stream was created from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw on `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw on the open interval `(0, 1)`.
    pub fn next_open01(&mut self) -> f64 {
        loop {
            let u = self.next_f64();
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Uniform draw on `[a, b)`.
    pub fn uniform(&mut self, a: f64, b: f64) -> Result<f64> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(invalid(format!("uniform bounds require a < b, got [{a}, {b})")));
        }
        Ok(self.uniform_unchecked(a, b))
    }

    pub(crate) fn uniform_unchecked(&mut self, a: f64, b: f64) -> f64 {
        let x = a + (b - a) * self.next_f64();
        if x >= b {
            // rounding of a + (b - a) * u can land on b
            f64::from_bits(b.to_bits() - 1).max(a)
        } else {
            x
        }
    }

    /// Bernoulli draw with success probability `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}
