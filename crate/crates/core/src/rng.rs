//! Design-time randomness.
//!
//! All memories are drawn from ChaCha8 (`rand_chacha` 0.9), seeded through
//! `SeedableRng::seed_from_u64`. Bounded integers use rejection sampling on
//! `next_u32` words so the stream maps to values identically on every
//! platform.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub(crate) fn design_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform integer in `[0, n)`. `n` must be non-zero.
pub(crate) fn uniform_below(rng: &mut impl RngCore, n: u32) -> u32 {
    debug_assert!(n > 0);
    let limit = (1u64 << 32) / u64::from(n) * u64::from(n);
    loop {
        let x = u64::from(rng.next_u32());
        if x < limit {
            return (x % u64::from(n)) as u32;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_below_stays_in_range() {
        let mut rng = design_rng(7);
        for n in [1u32, 2, 3, 100, 128, 1000] {
            for _ in 0..200 {
                assert!(uniform_below(&mut rng, n) < n);
            }
        }
    }

    #[test]
    fn stream_is_reproducible() {
        let a: alloc::vec::Vec<u32> = {
            let mut r = design_rng(42);
            (0..16).map(|_| uniform_below(&mut r, 128)).collect()
        };
        let b: alloc::vec::Vec<u32> = {
            let mut r = design_rng(42);
            (0..16).map(|_| uniform_below(&mut r, 128)).collect()
        };
        assert_eq!(a, b);
    }
}
