use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::NumericsError;

/// Seeded deterministic random stream.
///
/// Backed by splitmix64, so the sequence for a given seed is fixed across runs and platforms.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: SplitMix64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: SplitMix64::seed_from_u64(seed),
        }
    }

    /// Independent stream for task `index` of a sweep seeded with `base_seed`.
    pub fn for_task(base_seed: u64, index: u64) -> Self {
        Self::new(mix_seed(base_seed, index))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw from `[0, 1)` with 53 random bits.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw from `[a, b)`.
    pub fn uniform(&mut self, a: f64, b: f64) -> Result<f64, NumericsError> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(NumericsError::EmptyInterval { a, b });
        }
        let x = a + (b - a) * self.unit();
        // rounding can land exactly on b for wide intervals
        Ok(if x < b { x } else { a })
    }
}

/// Derives a per-task seed from a base seed with the splitmix64 finalizer.
pub fn mix_seed(base_seed: u64, index: u64) -> u64 {
    let mut z = base_seed
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
