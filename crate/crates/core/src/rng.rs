//! Portable seeded sampling for the randomized sums.
//!
//! The generator is SplitMix64. With a 64-bit state `s`, each output is
//!
//! ```text
//! s  <- s + 0x9E3779B97F4A7C15            (mod 2^64)
//! z  <- s
//! z  <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9   (mod 2^64)
//! z  <- (z ^ (z >> 27)) * 0x94D049BB133111EB   (mod 2^64)
//! out = z ^ (z >> 31)
//! ```
//!
//! A bounded draw in `[0, b)` takes the high word of `out * b` (a 128-bit
//! product), rejecting outputs whose low word is below `2^64 mod b`, which
//! makes it exactly uniform. Sampling without replacement is a sparse partial
//! Fisher–Yates shuffle of `0..=m_max`: draw `i` swaps position `i` with a
//! uniform position in `[i, m_max]` and emits the value found there.
//!
//! All three steps use only 64-bit integer arithmetic, so any implementation
//! of the equations above reproduces the same m-sets bit for bit.

use std::collections::HashMap;

use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// An independent child stream seeded from this one.
    pub fn split(&mut self) -> SplitMix64 {
        SplitMix64::new(self.next_u64())
    }

    /// Uniform integer in `[0, bound)`.
    ///
    /// # Panics
    ///
    /// Panics if `bound` is zero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let product = u128::from(self.next_u64()) * u128::from(bound);
            if (product as u64) >= threshold {
                return (product >> 64) as u64;
            }
        }
    }
}

/// Draws `count` distinct integers uniformly from `[0, m_max]`, in draw order.
pub fn sample_without_replacement(count: u64, m_max: u64, seed: u64) -> Result<Vec<u64>> {
    if count == 0 {
        return Err(Error::EmptySample);
    }
    let population = m_max
        .checked_add(1)
        .filter(|&p| count <= p)
        .ok_or(Error::SampleTooLarge { count, m_max })?;

    let mut rng = SplitMix64::new(seed);
    let mut displaced: HashMap<u64, u64> = HashMap::new();
    let mut out = Vec::with_capacity(count as usize);
    for i in 0..count {
        let j = i + rng.below(population - i);
        let at_i = displaced.get(&i).copied().unwrap_or(i);
        let at_j = displaced.get(&j).copied().unwrap_or(j);
        out.push(at_j);
        displaced.insert(j, at_i);
    }
    Ok(out)
}
