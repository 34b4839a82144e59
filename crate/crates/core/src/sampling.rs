//! Seeded sample generation.
//!
//! Sample sets must reproduce across implementations, so the generator is a
//! fixed 64-bit linear congruential generator rather than a library RNG:
//!
//! ```text
//! state  <- state * 6364136223846793005 + 1442695040888963407   (mod 2^64)
//! output  = (state >> 11) / 2^53                                 (in [0, 1))
//! ```
//!
//! The initial state is the seed itself. Each uniform draw advances the state
//! once, before the output is taken.

use num_complex::Complex64;
use std::f64::consts::TAU;

pub const LCG_MULTIPLIER: u64 = 6_364_136_223_846_793_005;
pub const LCG_INCREMENT: u64 = 1_442_695_040_888_963_407;

#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(LCG_MULTIPLIER)
            .wrapping_add(LCG_INCREMENT);
        self.state
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform on the disk `|z| < radius` (area measure). Two draws: modulus
    /// then angle.
    pub fn disk(&mut self, radius: f64) -> Complex64 {
        let r = radius * self.uniform().sqrt();
        let theta = TAU * self.uniform();
        Complex64::from_polar(r, theta)
    }

    /// Uniform on the circle `|z| = radius`.
    pub fn circle(&mut self, radius: f64) -> Complex64 {
        Complex64::from_polar(radius, TAU * self.uniform())
    }

    /// Uniform on the rectangle `[re_lo, re_hi) × [im_lo, im_hi)`.
    pub fn rect(&mut self, re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64) -> Complex64 {
        let re = self.range(re_lo, re_hi);
        let im = self.range(im_lo, im_hi);
        Complex64::new(re, im)
    }

    /// Both components uniform in `[-1, 1)`.
    pub fn coefficient(&mut self) -> Complex64 {
        self.rect(-1.0, 1.0, -1.0, 1.0)
    }

    /// Integer in `lo..=hi`.
    pub fn integer(&mut self, lo: usize, hi: usize) -> usize {
        let span = (hi - lo + 1) as f64;
        lo + ((self.uniform() * span) as usize).min(hi - lo)
    }

    pub fn disk_points(&mut self, radius: f64, count: usize) -> Vec<Complex64> {
        (0..count).map(|_| self.disk(radius)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_outputs_are_pinned() {
        let mut lcg = Lcg::new(7);
        let a = lcg.next_u64();
        assert_eq!(
            a,
            7u64.wrapping_mul(LCG_MULTIPLIER).wrapping_add(LCG_INCREMENT)
        );
        let mut lcg = Lcg::new(0);
        assert_eq!(lcg.next_u64(), LCG_INCREMENT);
    }

    #[test]
    fn uniform_stays_in_unit_interval() {
        let mut lcg = Lcg::new(42);
        for _ in 0..10_000 {
            let u = lcg.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn disk_samples_inside() {
        let mut lcg = Lcg::new(3);
        assert!(lcg.disk_points(0.4, 1000).iter().all(|z| z.norm() < 0.4));
    }

    #[test]
    fn integer_covers_range() {
        let mut lcg = Lcg::new(11);
        let mut seen = [false; 5];
        for _ in 0..200 {
            seen[lcg.integer(1, 5) - 1] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }
}
