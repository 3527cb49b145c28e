//! Search points and the OneMax / Jump / Cliff benchmark family.
//!
//! All three benchmarks are functions of unitation: the value of a point
//! depends only on its number of one-bits, so fitness can be computed per
//! level. Values are stored as *doubled* integers so that Cliff's
//! half-integer offset stays exact and acceptance decisions never touch
//! floating point.

use std::fmt;

use rand::Rng;

use crate::error::{invalid, Error, Result};

/// Fixed-length binary search point with a cached one-bit count.
///
/// The cache is updated incrementally on [`flip`](BitString::flip), so level
/// tracking inside a trial loop is O(1) per step.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
    ones: usize,
}

impl BitString {
    /// The all-zeros point of dimension `n`.
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "dimension must be positive");
        BitString {
            bits: vec![false; n],
            ones: 0,
        }
    }

    /// The all-ones point of dimension `n`.
    pub fn all_ones(n: usize) -> Self {
        assert!(n >= 1, "dimension must be positive");
        BitString {
            bits: vec![true; n],
            ones: n,
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        assert!(!bits.is_empty(), "dimension must be positive");
        let ones = bits.iter().filter(|&&b| b).count();
        BitString { bits, ones }
    }

    /// A point drawn uniformly at random from `{0,1}^n`.
    pub fn uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        assert!(n >= 1, "dimension must be positive");
        let bits: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        Self::from_bits(bits)
    }

    /// A point drawn uniformly among all strings with exactly `ones` one-bits.
    pub fn with_ones<R: Rng + ?Sized>(n: usize, ones: usize, rng: &mut R) -> Self {
        assert!(n >= 1, "dimension must be positive");
        assert!(ones <= n, "one-count must not exceed the dimension");
        let mut bits = vec![false; n];
        for i in rand::seq::index::sample(rng, n, ones) {
            bits[i] = true;
        }
        BitString { bits, ones }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false // dimension is always >= 1
    }

    /// Number of one-bits (the level of the point).
    pub fn ones(&self) -> usize {
        self.ones
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    /// Flips bit `i`, keeping the one-count cache consistent.
    pub fn flip(&mut self, i: usize) {
        if self.bits[i] {
            self.ones -= 1;
        } else {
            self.ones += 1;
        }
        self.bits[i] = !self.bits[i];
    }

    pub fn is_all_ones(&self) -> bool {
        self.ones == self.bits.len()
    }

    pub fn hamming_distance(&self, other: &Self) -> usize {
        assert_eq!(self.len(), other.len());
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }
}

/// Exact benchmark value, stored as twice the fitness.
///
/// OneMax and Jump values double to even integers; Cliff's penalized region
/// doubles to odd ones. Comparisons are exact integer comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fitness(i64);

impl Fitness {
    pub fn from_doubled(doubled: i64) -> Self {
        Fitness(doubled)
    }

    pub fn from_whole(value: i64) -> Self {
        Fitness(2 * value)
    }

    pub fn doubled(self) -> i64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for Fitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}", self.0 as f64 / 2.0)
        }
    }
}

/// Tagged choice of benchmark: OneMax, Jump with gap width `m`, or Cliff
/// with cliff width `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitnessFunction {
    OneMax { n: usize },
    Jump { n: usize, m: usize },
    Cliff { n: usize, d: usize },
}

impl FitnessFunction {
    pub fn one_max(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "dimension must be positive"));
        }
        Ok(FitnessFunction::OneMax { n })
    }

    pub fn jump(n: usize, m: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "dimension must be positive"));
        }
        if m < 1 || m > n {
            return Err(invalid("m", format!("gap width must be in [1..{n}], got {m}")));
        }
        Ok(FitnessFunction::Jump { n, m })
    }

    pub fn cliff(n: usize, d: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "dimension must be positive"));
        }
        if d < 1 || d > n {
            return Err(invalid("d", format!("cliff width must be in [1..{n}], got {d}")));
        }
        Ok(FitnessFunction::Cliff { n, d })
    }

    pub fn n(&self) -> usize {
        match *self {
            FitnessFunction::OneMax { n }
            | FitnessFunction::Jump { n, .. }
            | FitnessFunction::Cliff { n, .. } => n,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FitnessFunction::OneMax { .. } => "onemax",
            FitnessFunction::Jump { .. } => "jump",
            FitnessFunction::Cliff { .. } => "cliff",
        }
    }

    /// Fitness shared by every point with `level` one-bits.
    pub fn level_fitness(&self, level: usize) -> Result<Fitness> {
        let n = self.n();
        if level > n {
            return Err(Error::LevelOutOfRange { level, n });
        }
        let k = level as i64;
        let doubled = match *self {
            FitnessFunction::OneMax { .. } => 2 * k,
            FitnessFunction::Jump { n, m } => {
                if level <= n - m || level == n {
                    2 * (m as i64 + k)
                } else {
                    2 * (n as i64 - k)
                }
            }
            FitnessFunction::Cliff { n, d } => {
                if level <= n - d {
                    2 * k
                } else {
                    2 * k - 2 * d as i64 + 1
                }
            }
        };
        Ok(Fitness::from_doubled(doubled))
    }

    pub fn evaluate(&self, x: &BitString) -> Result<Fitness> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                actual: x.len(),
            });
        }
        self.level_fitness(x.ones())
    }

    /// The unique maximum, attained by the all-ones point for all three
    /// benchmarks.
    pub fn max_fitness(&self) -> Fitness {
        self.level_fitness(self.n()).expect("level n is in range")
    }

    /// Distance `|n - m - ||x||_1|` to the local-optimum level, defined as 0
    /// at the global optimum. Jump only.
    pub fn potential(&self, x: &BitString) -> Result<usize> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                actual: x.len(),
            });
        }
        if x.is_all_ones() {
            return self.potential_of_level(self.n());
        }
        self.potential_of_level(x.ones())
    }

    /// Level form of [`potential`](Self::potential). Level `n` is the
    /// all-ones point, so the zero-at-optimum rule applies there.
    pub fn potential_of_level(&self, level: usize) -> Result<usize> {
        match *self {
            FitnessFunction::Jump { n, m } => {
                if level > n {
                    return Err(Error::LevelOutOfRange { level, n });
                }
                if level == n {
                    Ok(0)
                } else {
                    Ok((n - m).abs_diff(level))
                }
            }
            other => Err(Error::NotJump { found: other.name() }),
        }
    }

    /// Membership in the target set `{ x : ||x||_1 in {n-m, n} }`. Jump only.
    pub fn in_target_set(&self, x: &BitString) -> Result<bool> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                actual: x.len(),
            });
        }
        self.is_target_level(x.ones())
    }

    /// Level form of [`in_target_set`](Self::in_target_set). Jump only.
    pub fn is_target_level(&self, level: usize) -> Result<bool> {
        match *self {
            FitnessFunction::Jump { n, m } => {
                if level > n {
                    return Err(Error::LevelOutOfRange { level, n });
                }
                Ok(level == n - m || level == n)
            }
            other => Err(Error::NotJump { found: other.name() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn level_fitness_examples() {
        let jump = FitnessFunction::jump(6, 2).unwrap();
        assert_eq!(jump.level_fitness(5).unwrap(), Fitness::from_whole(1));
        assert_eq!(jump.level_fitness(6).unwrap(), Fitness::from_whole(8));

        let cliff = FitnessFunction::cliff(6, 2).unwrap();
        assert_eq!(cliff.level_fitness(5).unwrap(), Fitness::from_doubled(7)); // 3.5
        assert_eq!(cliff.level_fitness(5).unwrap().to_f64(), 3.5);

        let onemax = FitnessFunction::one_max(5).unwrap();
        assert_eq!(onemax.level_fitness(5).unwrap(), Fitness::from_whole(5));

        assert!(matches!(
            jump.level_fitness(7),
            Err(Error::LevelOutOfRange { level: 7, n: 6 })
        ));
    }

    #[test]
    fn evaluate_examples() {
        let onemax = FitnessFunction::one_max(4).unwrap();
        assert_eq!(
            onemax.evaluate(&BitString::zeros(4)).unwrap(),
            Fitness::from_whole(0)
        );

        let x = BitString::from_bits(vec![true, true, true, true, true, false]);
        let jump = FitnessFunction::jump(6, 2).unwrap();
        assert_eq!(jump.evaluate(&x).unwrap(), Fitness::from_whole(1));

        let cliff = FitnessFunction::cliff(6, 2).unwrap();
        assert_eq!(cliff.evaluate(&x).unwrap().to_f64(), 3.5);

        assert!(matches!(
            jump.evaluate(&BitString::zeros(5)),
            Err(Error::DimensionMismatch { expected: 6, actual: 5 })
        ));
    }

    #[test]
    fn potential_examples() {
        let jump = FitnessFunction::jump(6, 2).unwrap();
        assert_eq!(jump.potential_of_level(4).unwrap(), 0);
        assert_eq!(jump.potential_of_level(5).unwrap(), 1);
        assert_eq!(jump.potential(&BitString::all_ones(6)).unwrap(), 0);

        let onemax = FitnessFunction::one_max(6).unwrap();
        assert!(matches!(
            onemax.potential_of_level(3),
            Err(Error::NotJump { found: "onemax" })
        ));
    }

    #[test]
    fn target_set_examples() {
        let jump = FitnessFunction::jump(6, 2).unwrap();
        assert!(jump.is_target_level(4).unwrap());
        assert!(!jump.is_target_level(5).unwrap());
        assert!(jump.is_target_level(6).unwrap());
        let onemax = FitnessFunction::one_max(6).unwrap();
        assert!(onemax.is_target_level(4).is_err());
    }

    #[test]
    fn unitation_property_exhaustive() {
        // every pair of points on the same level shares the fitness value;
        // for n <= 12 check every point against its level value
        for n in 1..=12usize {
            let fns = [
                FitnessFunction::one_max(n).unwrap(),
                FitnessFunction::jump(n, 1 + n / 3).unwrap(),
                FitnessFunction::cliff(n, 1 + n / 4).unwrap(),
            ];
            for mask in 0u32..(1 << n) {
                let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
                let x = BitString::from_bits(bits);
                for f in &fns {
                    assert_eq!(
                        f.evaluate(&x).unwrap(),
                        f.level_fitness(x.ones()).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn jump_extremes() {
        for n in 2..=20usize {
            for m in 1..=n {
                let f = FitnessFunction::jump(n, m).unwrap();
                let top = f.level_fitness(n).unwrap();
                assert_eq!(top, Fitness::from_whole((n + m) as i64));
                for k in 0..n {
                    assert!(f.level_fitness(k).unwrap() < top, "n={n} m={m} k={k}");
                }
                let local = f.level_fitness(n - m).unwrap();
                assert_eq!(local, Fitness::from_whole(n as i64));
                for k in n - m + 1..n {
                    assert!(f.level_fitness(k).unwrap() < local);
                }
            }
        }
    }

    #[test]
    fn cliff_monotone_on_both_slopes() {
        for n in 2..=20usize {
            for d in 1..=n {
                let f = FitnessFunction::cliff(n, d).unwrap();
                for k in 0..n - d {
                    assert!(f.level_fitness(k).unwrap() < f.level_fitness(k + 1).unwrap());
                }
                for k in n - d + 1..n {
                    assert!(f.level_fitness(k).unwrap() < f.level_fitness(k + 1).unwrap());
                }
            }
        }
    }

    #[test]
    fn potential_zero_exactly_on_target_set() {
        for n in 2..=16usize {
            for m in 1..=n - 1 {
                let f = FitnessFunction::jump(n, m).unwrap();
                for k in 0..=n {
                    let zero = f.potential_of_level(k).unwrap() == 0;
                    assert_eq!(zero, f.is_target_level(k).unwrap(), "n={n} m={m} k={k}");
                }
            }
        }
    }

    #[test]
    fn with_ones_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let x = BitString::with_ones(12, 5, &mut rng);
            assert_eq!(x.ones(), 5);
            assert_eq!(x.len(), 12);
        }
    }

    proptest! {
        #[test]
        fn flip_keeps_cache_consistent(n in 1usize..40, seed in 0u64..1000, flips in 0usize..64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut x = BitString::uniform(n, &mut rng);
            for _ in 0..flips {
                let i = rng.random_range(0..n);
                x.flip(i);
                let recount = (0..n).filter(|&j| x.get(j)).count();
                prop_assert_eq!(x.ones(), recount);
            }
        }
    }
}
