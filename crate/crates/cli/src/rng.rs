//! Reproducible randomness for verification trials.
//!
//! The generator is SplitMix64: the state advances by `0x9e3779b97f4a7c15`
//! and each output is the state passed through [`mix64`]. Trial `t` of a
//! suite named `name` under seed `s` starts from
//!
//! ```text
//! trial_seed(s, name, t) = mix64(s + mix64(fnv1a64(name) + t))
//! ```
//!
//! (wrapping arithmetic), so any single failure is reproducible from
//! `(seed, suite, trial)` without replaying earlier trials. Bounded draws
//! use the high half of a 128-bit product (`(x · bound) >> 64`).

use hecke::GaussianRational;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// The SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a.
pub fn fnv1a64(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

pub fn trial_seed(seed: u64, suite: &str, trial: u64) -> u64 {
    mix64(seed.wrapping_add(mix64(fnv1a64(suite).wrapping_add(trial))))
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform-ish draw from `0..bound`; `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        ((u128::from(self.next_u64()) * u128::from(bound)) >> 64) as u64
    }

    /// Draw from the inclusive range `lo..=hi`.
    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi, "empty range");
        let width = (hi - lo) as u64 + 1;
        lo + self.below(width) as i64
    }

    pub fn chance(&mut self, numer: u64, denom: u64) -> bool {
        self.below(denom) < numer
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len() as u64) as usize]
    }

    /// Fisher-Yates, drawing from the top index down.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// A rational `p/q` with `p ∈ [−9, 9] \ {0}` and `q ∈ [1, 9]`.
    pub fn small_rational(&mut self) -> GaussianRational {
        let mut p = self.range(-9, 8);
        if p >= 0 {
            p += 1;
        }
        let q = self.range(1, 9);
        GaussianRational::from_ratio(p, q).expect("q ≥ 1")
    }

    /// A small rational that is not an integer.
    pub fn fractional(&mut self) -> GaussianRational {
        loop {
            let x = self.small_rational();
            if x.as_i64().is_none() {
                return x;
            }
        }
    }

    /// A lower parameter: a small rational resampled until it is not a
    /// nonpositive integer.
    pub fn lower_parameter(&mut self) -> GaussianRational {
        loop {
            let x = self.small_rational();
            if !x.is_nonpositive_integer() {
                return x;
            }
        }
    }

    /// A series coefficient: zero one time in eight, otherwise a small
    /// rational with, half of the time, a small imaginary part.
    pub fn coefficient(&mut self) -> GaussianRational {
        if self.chance(1, 8) {
            return GaussianRational::zero();
        }
        let re = self.small_rational();
        if self.chance(1, 2) {
            re
        } else {
            re + self.small_rational() * GaussianRational::i()
        }
    }
}
