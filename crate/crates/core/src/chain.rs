//! Exact analysis of the one-bit move-acceptance hyper-heuristic on Jump as
//! a birth-death chain over the one-count levels `0..=n`.
//!
//! Three independent routes to the same hitting times keep each other
//! honest:
//!
//! * [`LevelChain::expected_uphill_time`] — the standard birth-death formula
//!   `E[T_i+] = sum_{k<=i} (1/p_k+) prod_{l=k+1..=i} (p_l-/p_l+)`,
//! * [`last_uphill_closed_form`] — the closed form
//!   `p^{n-2m+1} sum_{k=0}^{n-m-1} p^{-k} C(n,k) + p^{1-n} sum_{k=n-m}^{n-1} C(n,k) p^k`,
//! * [`LevelChain::optimum_hitting_times`] — first-step equations solved by
//!   tridiagonal elimination.
//!
//! All arithmetic is exact over arbitrary-precision rationals; genuinely
//! infinite expectations (e.g. `p = 0`, where the local optimum is
//! absorbing) are a typed sentinel, not an error. Decimal rendering is left
//! to the presentation layer.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

use crate::bench::FitnessFunction;
use crate::error::{invalid, Result};

/// An exact expected step count: a nonnegative rational or infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactTime {
    Finite(BigRational),
    Infinite,
}

impl ExactTime {
    pub fn zero() -> Self {
        ExactTime::Finite(BigRational::zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExactTime::Infinite)
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactTime::Finite(r) => Some(r),
            ExactTime::Infinite => None,
        }
    }

    /// Best-effort conversion; `f64::INFINITY` for the sentinel. Handles
    /// rationals whose numerator and denominator both overflow `f64`.
    pub fn to_f64(&self) -> f64 {
        match self {
            ExactTime::Infinite => f64::INFINITY,
            ExactTime::Finite(r) => rational_to_f64(r),
        }
    }

    pub fn add(&self, other: &ExactTime) -> ExactTime {
        match (self, other) {
            (ExactTime::Finite(a), ExactTime::Finite(b)) => ExactTime::Finite(a + b),
            _ => ExactTime::Infinite,
        }
    }

    /// Scales by a nonnegative rational; `0 * Infinite` is 0 (an impossible
    /// branch contributes nothing to an expectation).
    pub fn scale(&self, weight: &BigRational) -> ExactTime {
        if weight.is_zero() {
            return ExactTime::zero();
        }
        match self {
            ExactTime::Finite(r) => ExactTime::Finite(r * weight),
            ExactTime::Infinite => ExactTime::Infinite,
        }
    }
}

impl PartialOrd for ExactTime {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactTime {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExactTime::Infinite, ExactTime::Infinite) => Ordering::Equal,
            (ExactTime::Infinite, ExactTime::Finite(_)) => Ordering::Greater,
            (ExactTime::Finite(_), ExactTime::Infinite) => Ordering::Less,
            (ExactTime::Finite(a), ExactTime::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExactTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactTime::Finite(r) => write!(f, "{r}"),
            ExactTime::Infinite => write!(f, "inf"),
        }
    }
}

/// `f64` conversion that survives numerators/denominators far beyond the
/// `f64` range by shifting both down and re-applying the exponent.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() || r.denom().is_one() {
            return v;
        }
    }
    let numer = r.numer();
    let denom = r.denom();
    let shift_n = numer.bits().saturating_sub(512) as i64;
    let shift_d = denom.bits().saturating_sub(512) as i64;
    let n_small = (numer >> shift_n as usize).to_f64().unwrap_or(f64::NAN);
    let d_small = (denom >> shift_d as usize).to_f64().unwrap_or(f64::NAN);
    (n_small / d_small) * 2f64.powi((shift_n - shift_d).clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

/// Birth-death chain of the one-bit hyper-heuristic on `Jump(n, m)` with
/// mixing probability `p`: per level `k`, the probability `up[k]` of moving
/// to `k+1` and `down[k]` of moving to `k-1`. Self-loops are implicit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelChain {
    n: usize,
    m: usize,
    p: BigRational,
    up: Vec<BigRational>,   // index k in 0..n
    down: Vec<BigRational>, // index k in 0..n, down[0] = 0
}

impl LevelChain {
    /// Derives the transition probabilities from one-bit flip counts plus
    /// the acceptance rule: a strictly improving move is always accepted, any
    /// other move only when the accept-everything operator (probability `p`)
    /// was drawn.
    ///
    /// For `m >= 2` this reproduces the explicit table: on the slope
    /// (`k <= n-m-1`) `up = (n-k)/n`, `down = (k/n) p`; at the local optimum
    /// `up = (m/n) p`, `down = ((n-m)/n) p`; in the gap interior
    /// (`n-m+1 <= k <= n-2`) `up = ((n-k)/n) p`, `down = k/n`; and at
    /// `k = n-1` `up = 1/n`, `down = (n-1)/n`. For `m = 1` the function is
    /// monotone and every level behaves like the slope.
    pub fn build(n: usize, m: usize, p: &BigRational) -> Result<Self> {
        if n < 2 {
            return Err(invalid("n", "dimension must be at least 2"));
        }
        if m < 1 || m > n - 1 {
            return Err(invalid("m", format!("gap width must be in [1..{}], got {m}", n - 1)));
        }
        if p.is_negative() || p > &BigRational::one() {
            return Err(invalid("p", format!("mixing probability must be in [0,1], got {p}")));
        }
        let f = FitnessFunction::jump(n, m)?;
        let frac = |num: usize| BigRational::new(BigInt::from(num), BigInt::from(n));
        let mut up = Vec::with_capacity(n);
        let mut down = Vec::with_capacity(n);
        for k in 0..n {
            let here = f.level_fitness(k)?;
            let above = f.level_fitness(k + 1)?;
            let acc_up = if above > here { BigRational::one() } else { p.clone() };
            up.push(frac(n - k) * acc_up);
            if k == 0 {
                down.push(BigRational::zero());
            } else {
                let below = f.level_fitness(k - 1)?;
                let acc_down = if below > here { BigRational::one() } else { p.clone() };
                down.push(frac(k) * acc_down);
            }
        }
        Ok(LevelChain { n, m, p: p.clone(), up, down })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> &BigRational {
        &self.p
    }

    /// Probability of `k -> k+1`, for `k < n`.
    pub fn up(&self, k: usize) -> &BigRational {
        &self.up[k]
    }

    /// Probability of `k -> k-1`, for `k < n`; zero at `k = 0`.
    pub fn down(&self, k: usize) -> &BigRational {
        &self.down[k]
    }

    /// Expected time to first reach level `from_level + 1` starting at
    /// `from_level`, by the birth-death uphill sum
    /// `sum_{k=0}^{i} (1/up_k) prod_{l=k+1}^{i} (down_l/up_l)`.
    ///
    /// Infinite as soon as some `up_k = 0` with `k <= from_level`: the chain
    /// can drift down to that level and never pass it again.
    pub fn expected_uphill_time(&self, from_level: usize) -> ExactTime {
        let i = from_level;
        assert!(i < self.n, "from_level must be below n");
        if self.up[..=i].iter().any(|u| u.is_zero()) {
            return ExactTime::Infinite;
        }
        let mut total = BigRational::zero();
        let mut prod = BigRational::one(); // prod_{l=k+1}^{i} down_l/up_l
        for k in (0..=i).rev() {
            total += &prod / &self.up[k];
            if k > 0 {
                prod *= &self.down[k] / &self.up[k];
            }
        }
        ExactTime::Finite(total)
    }

    /// Expected times to hit the all-ones level from every level, solved
    /// independently of the uphill recurrence via first-step equations
    /// `up_k (h_k - h_{k+1}) + down_k (h_k - h_{k-1}) = 1`, `h_n = 0`.
    pub fn optimum_hitting_times(&self) -> Vec<ExactTime> {
        let mut targets = vec![false; self.n + 1];
        targets[self.n] = true;
        self.hitting_times_to(&targets)
    }

    /// Expected runtime (hitting time of the optimum) from a start level or
    /// from a uniform random point, whose level is Binomial(n, 1/2).
    pub fn expected_runtime(&self, start: ChainStart) -> Result<ExactTime> {
        let h = self.optimum_hitting_times();
        match start {
            ChainStart::Level(k) => {
                if k > self.n {
                    return Err(crate::error::Error::LevelOutOfRange { level: k, n: self.n });
                }
                Ok(h[k].clone())
            }
            ChainStart::UniformRandom => {
                let denom = BigInt::one() << self.n;
                let mut total = ExactTime::zero();
                for (k, hk) in h.iter().enumerate() {
                    let weight =
                        BigRational::new(binomial(BigInt::from(self.n), BigInt::from(k)), denom.clone());
                    total = total.add(&hk.scale(&weight));
                }
                Ok(total)
            }
        }
    }

    /// Expected return time to the target set `{n-m, n}` starting at the
    /// local-optimum level `n - m`, i.e. the exact expected phase length.
    ///
    /// First-step decomposition: with probability `1 - up - down` the chain
    /// stays in the set (length 1); otherwise it pays the two-sided hitting
    /// time from the neighbor it moved to.
    pub fn expected_return_time(&self) -> ExactTime {
        let local = self.n - self.m;
        let mut targets = vec![false; self.n + 1];
        targets[local] = true;
        targets[self.n] = true;
        let g = self.hitting_times_to(&targets);
        let mut total = ExactTime::Finite(BigRational::one());
        if !self.up[local].is_zero() {
            total = total.add(&g[local + 1].scale(&self.up[local]));
        }
        if local > 0 && !self.down[local].is_zero() {
            total = total.add(&g[local - 1].scale(&self.down[local]));
        }
        total
    }

    /// Expected time to first hit any target level, from every level.
    /// Tridiagonal forward elimination writing `h_k = a_k + b_k h_{k+1}` for
    /// non-target levels; infinities propagate wherever the walk can fall
    /// into a region that cannot reach a target.
    fn hitting_times_to(&self, targets: &[bool]) -> Vec<ExactTime> {
        assert_eq!(targets.len(), self.n + 1);
        assert!(targets[self.n], "level n is absorbing and must be a target");

        enum Row {
            Finite { a: BigRational, b: BigRational },
            Infinite,
        }
        let mut rows: Vec<Option<Row>> = Vec::with_capacity(self.n);
        for k in 0..self.n {
            if targets[k] {
                rows.push(None);
                continue;
            }
            let up = &self.up[k];
            let down = &self.down[k];
            // h_{k-1} seen from level k: zero for a target or the bottom wall,
            // otherwise the previously eliminated row
            let below: Option<(&BigRational, &BigRational)> = if k == 0 || targets[k - 1] {
                None
            } else {
                match rows[k - 1].as_ref().expect("non-target row was eliminated") {
                    Row::Infinite => {
                        if !down.is_zero() {
                            rows.push(Some(Row::Infinite));
                            continue;
                        }
                        None
                    }
                    Row::Finite { a, b } => Some((a, b)),
                }
            };
            let (below_a, below_b) = match below {
                Some((a, b)) => (a.clone(), b.clone()),
                None => (BigRational::zero(), BigRational::zero()),
            };
            let denom = up + down - down * &below_b;
            if denom.is_zero() {
                rows.push(Some(Row::Infinite));
                continue;
            }
            let a = (BigRational::one() + down * below_a) / &denom;
            let b = up / &denom;
            rows.push(Some(Row::Finite { a, b }));
        }

        let mut h = vec![ExactTime::zero(); self.n + 1];
        for k in (0..self.n).rev() {
            if targets[k] {
                continue;
            }
            h[k] = match rows[k].as_ref().expect("non-target row was eliminated") {
                Row::Infinite => ExactTime::Infinite,
                Row::Finite { a, b } => match &h[k + 1] {
                    ExactTime::Infinite => {
                        if b.is_zero() {
                            ExactTime::Finite(a.clone())
                        } else {
                            ExactTime::Infinite
                        }
                    }
                    ExactTime::Finite(next) => ExactTime::Finite(a + b * next),
                },
            };
        }
        h
    }
}

/// Start level for [`LevelChain::expected_runtime`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainStart {
    Level(usize),
    UniformRandom,
}

/// Closed form for the expected time from level `n-1` to level `n`:
/// `p^{n-2m+1} sum_{k=0}^{n-m-1} p^{-k} C(n,k) + p^{1-n} sum_{k=n-m}^{n-1} C(n,k) p^k`.
///
/// Requires `1 <= m <= n/2` so every exponent is well formed; `p = 0` yields
/// the infinite sentinel (the local optimum is absorbing).
pub fn last_uphill_closed_form(n: usize, m: usize, p: &BigRational) -> Result<ExactTime> {
    if n < 2 {
        return Err(invalid("n", "dimension must be at least 2"));
    }
    if m < 1 || 2 * m > n {
        return Err(invalid("m", format!("gap width must be in [1..{}], got {m}", n / 2)));
    }
    if p.is_negative() || p > &BigRational::one() {
        return Err(invalid("p", format!("mixing probability must be in [0,1], got {p}")));
    }
    if p.is_zero() {
        return Ok(ExactTime::Infinite);
    }
    let choose = |k: usize| BigRational::from_integer(binomial(BigInt::from(n), BigInt::from(k)));
    let mut first = BigRational::zero();
    for k in 0..=n - m - 1 {
        first += rational_pow(p, -(k as i64)) * choose(k);
    }
    first *= rational_pow(p, n as i64 - 2 * m as i64 + 1);
    let mut second = BigRational::zero();
    for k in n - m..=n - 1 {
        second += choose(k) * rational_pow(p, k as i64);
    }
    second *= rational_pow(p, 1 - n as i64);
    Ok(ExactTime::Finite(first + second))
}

/// Exact `base^exp` with negative exponents allowed (`base != 0` then).
pub fn rational_pow(base: &BigRational, exp: i64) -> BigRational {
    if exp == 0 {
        return BigRational::one();
    }
    let e = exp.unsigned_abs() as u32;
    let numer = base.numer().pow(e);
    let denom = base.denom().pow(e);
    if exp > 0 {
        BigRational::new(numer, denom)
    } else {
        assert!(!base.is_zero(), "negative power of zero");
        BigRational::new(denom, numer)
    }
}
