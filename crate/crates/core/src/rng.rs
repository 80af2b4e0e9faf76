//! Deterministic 64-bit random generator used by the chaos game and by
//! pair sampling.
//!
//! The algorithm is pinned as an interface promise and must not change
//! within a major version:
//!
//! 1. the 64-bit seed is expanded into four state words with the
//!    SplitMix64 generator (Steele, Lea, Flood 2014): on each call the
//!    state advances by `0x9e3779b97f4a7c15` and the output is the
//!    advanced state mixed by two xor-shift-multiply rounds with the
//!    constants `0xbf58476d1ce4e5b9` and `0x94d049bb133111eb`;
//! 2. the stream itself is xoshiro256** 1.0 (Blackman, Vigna 2018):
//!    output `rotl(s1 * 5, 7) * 9`, followed by the standard linear
//!    state transition.
//!
//! Map indices are drawn as `next_u64() % n`; unit doubles use the top 53
//! bits divided by 2^53.

/// Seeded xoshiro256** generator with SplitMix64 seeding.
#[derive(Debug, Clone)]
pub struct Rng {
    s: [u64; 4],
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        let mut sm = seed;
        let mut next_sm = || {
            sm = sm.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = sm;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z ^ (z >> 31)
        };
        Rng {
            s: [next_sm(), next_sm(), next_sm(), next_sm()],
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform index in `0..n`. Panics if `n == 0`.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index range must be non-empty");
        (self.next_u64() % n as u64) as usize
    }

    /// Uniform double in `[0, 1)`.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let a: alloc::vec::Vec<u64> = {
            let mut r = Rng::new(7);
            (0..16).map(|_| r.next_u64()).collect()
        };
        let b: alloc::vec::Vec<u64> = {
            let mut r = Rng::new(7);
            (0..16).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
        let c = Rng::new(8).next_u64();
        assert_ne!(a[0], c);
    }

    #[test]
    fn unit_range() {
        let mut r = Rng::new(0);
        for _ in 0..1000 {
            let x = r.unit_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }
}
