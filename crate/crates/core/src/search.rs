//! Mutation operators, acceptance rules, and the single-trajectory search
//! loop shared by the move-acceptance hyper-heuristic (one-bit and bit-wise
//! mutation), the (1+1) EA, and RLS.
//!
//! Per step the random draws are consumed in a fixed order: first the
//! mutation draws, then one draw selecting the acceptance operator. This
//! keeps trajectories reproducible across refactors for a given seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bench::{BitString, Fitness, FitnessFunction};
use crate::error::{invalid, Error, Result};

/// One-bit flip or independent bit-wise flips with a per-bit rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MutationOperator {
    OneBit,
    Bitwise { rate: f64 },
}

impl MutationOperator {
    /// Bit-wise mutation with an explicit rate in (0, 1].
    pub fn bitwise(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(invalid("rate", format!("flip rate must be in (0,1], got {rate}")));
        }
        Ok(MutationOperator::Bitwise { rate })
    }

    /// The standard rate 1/n.
    pub fn standard_bitwise(n: usize) -> Self {
        MutationOperator::Bitwise { rate: 1.0 / n as f64 }
    }
}

/// Move acceptance rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AcceptanceRule {
    /// Accept any new solution.
    AllMoves,
    /// Accept only strict improvements.
    OnlyImproving,
    /// Accept strict improvements and equally good solutions.
    ImprovingAndEqual,
}

impl AcceptanceRule {
    pub fn name(&self) -> &'static str {
        match self {
            AcceptanceRule::AllMoves => "all-moves",
            AcceptanceRule::OnlyImproving => "only-improving",
            AcceptanceRule::ImprovingAndEqual => "improving-and-equal",
        }
    }
}

pub fn decide_acceptance(rule: AcceptanceRule, current: Fitness, candidate: Fitness) -> bool {
    match rule {
        AcceptanceRule::AllMoves => true,
        AcceptanceRule::OnlyImproving => candidate > current,
        AcceptanceRule::ImprovingAndEqual => candidate >= current,
    }
}

/// A single-trajectory algorithm: a mutation operator plus the mixing
/// probability `p` of accepting any move, falling back to `elitist_rule`
/// otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgorithmConfig {
    pub name: String,
    pub mutation: MutationOperator,
    /// Probability of drawing the accept-everything operator.
    pub p: f64,
    pub elitist_rule: AcceptanceRule,
}

impl AlgorithmConfig {
    pub fn new(
        name: impl Into<String>,
        mutation: MutationOperator,
        p: f64,
        elitist_rule: AcceptanceRule,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid("p", format!("mixing probability must be in [0,1], got {p}")));
        }
        Ok(AlgorithmConfig {
            name: name.into(),
            mutation,
            p,
            elitist_rule,
        })
    }
}

/// Canonical configurations.
///
/// * `mahh-onebit`: one-bit mutation, mixing probability `p`, only-improving.
/// * `mahh-global`: bit-wise mutation at rate 1/n, mixing probability `p`,
///   only-improving.
/// * `opo-ea`: the (1+1) EA — bit-wise at 1/n, `p` forced to 0,
///   improving-and-equal.
/// * `rls`: one-bit, `p` forced to 0, improving-and-equal.
pub fn baseline_config(name: &str, n: usize, p: f64) -> Result<AlgorithmConfig> {
    match name {
        "mahh-onebit" => AlgorithmConfig::new(name, MutationOperator::OneBit, p, AcceptanceRule::OnlyImproving),
        "mahh-global" => AlgorithmConfig::new(
            name,
            MutationOperator::standard_bitwise(n),
            p,
            AcceptanceRule::OnlyImproving,
        ),
        "opo-ea" => AlgorithmConfig::new(
            name,
            MutationOperator::standard_bitwise(n),
            0.0,
            AcceptanceRule::ImprovingAndEqual,
        ),
        "rls" => AlgorithmConfig::new(name, MutationOperator::OneBit, 0.0, AcceptanceRule::ImprovingAndEqual),
        other => Err(Error::UnknownAlgorithm { name: other.to_string() }),
    }
}

/// Current point, its fitness, and the number of executed steps.
#[derive(Clone, Debug)]
pub struct SearchState {
    x: BitString,
    fitness: Fitness,
    step_count: u64,
}

impl SearchState {
    pub fn new(f: &FitnessFunction, x: BitString) -> Result<Self> {
        let fitness = f.evaluate(&x)?;
        Ok(SearchState { x, fitness, step_count: 0 })
    }

    pub fn x(&self) -> &BitString {
        &self.x
    }

    pub fn fitness(&self) -> Fitness {
        self.fitness
    }

    pub fn level(&self) -> usize {
        self.x.ones()
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }
}

/// What a single step did.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepEvent {
    pub level_before: usize,
    pub level_after: usize,
    pub accepted: bool,
    /// The acceptance operator drawn for this step.
    pub operator: AcceptanceRule,
}

/// Returns a copy of `x` with exactly one uniformly chosen bit flipped.
pub fn mutate_one_bit<R: Rng + ?Sized>(x: &BitString, rng: &mut R) -> BitString {
    let mut y = x.clone();
    y.flip(rng.random_range(0..x.len()));
    y
}

/// Returns a copy of `x` with each bit flipped independently with
/// probability `rate`.
pub fn mutate_bitwise<R: Rng + ?Sized>(x: &BitString, rate: f64, rng: &mut R) -> BitString {
    let mut y = x.clone();
    for i in 0..x.len() {
        if rng.random_bool(rate) {
            y.flip(i);
        }
    }
    y
}

// Draws the flip positions for one step. Bitwise always consumes exactly n
// draws so the stream stays aligned regardless of the outcome.
fn draw_flips<R: Rng + ?Sized>(
    mutation: &MutationOperator,
    n: usize,
    rng: &mut R,
    flips: &mut Vec<usize>,
) {
    flips.clear();
    match *mutation {
        MutationOperator::OneBit => flips.push(rng.random_range(0..n)),
        MutationOperator::Bitwise { rate } => {
            for i in 0..n {
                if rng.random_bool(rate) {
                    flips.push(i);
                }
            }
        }
    }
}

/// Executes one iteration in place: mutate, draw the acceptance operator,
/// accept or revert.
pub fn step<R: Rng + ?Sized>(
    state: &mut SearchState,
    cfg: &AlgorithmConfig,
    f: &FitnessFunction,
    rng: &mut R,
) -> StepEvent {
    let mut flips = Vec::new();
    step_with_buffer(state, cfg, f, rng, &mut flips)
}

fn step_with_buffer<R: Rng + ?Sized>(
    state: &mut SearchState,
    cfg: &AlgorithmConfig,
    f: &FitnessFunction,
    rng: &mut R,
    flips: &mut Vec<usize>,
) -> StepEvent {
    let level_before = state.x.ones();
    draw_flips(&cfg.mutation, state.x.len(), rng, flips);
    for &i in flips.iter() {
        state.x.flip(i);
    }
    let candidate = f
        .level_fitness(state.x.ones())
        .expect("level is always in range");
    // operator draw comes after the mutation draws
    let operator = if rng.random_bool(cfg.p) {
        AcceptanceRule::AllMoves
    } else {
        cfg.elitist_rule
    };
    let accepted = decide_acceptance(operator, state.fitness, candidate);
    if accepted {
        state.fitness = candidate;
    } else {
        for &i in flips.iter() {
            state.x.flip(i);
        }
    }
    state.step_count += 1;
    StepEvent {
        level_before,
        level_after: state.x.ones(),
        accepted,
        operator,
    }
}

/// Initial point policy for a trial.
#[derive(Clone, Debug, PartialEq)]
pub enum Start {
    /// Uniform over `{0,1}^n`.
    UniformRandom,
    /// A fixed point.
    Point(BitString),
    /// Uniform among the points with the given number of one-bits.
    Level(usize),
    /// Uniform among the points at level `n - m`. Jump only.
    LocalOptimum,
}

impl Start {
    pub fn resolve<R: Rng + ?Sized>(&self, f: &FitnessFunction, rng: &mut R) -> Result<BitString> {
        let n = f.n();
        match self {
            Start::UniformRandom => Ok(BitString::uniform(n, rng)),
            Start::Point(x) => {
                if x.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, actual: x.len() });
                }
                Ok(x.clone())
            }
            Start::Level(k) => {
                if *k > n {
                    return Err(Error::LevelOutOfRange { level: *k, n });
                }
                Ok(BitString::with_ones(n, *k, rng))
            }
            Start::LocalOptimum => match *f {
                FitnessFunction::Jump { n, m } => Ok(BitString::with_ones(n, n - m, rng)),
                other => Err(Error::NotJump { found: other.name() }),
            },
        }
    }
}

/// Outcome of a driven trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub steps: u64,
    pub hit_optimum: bool,
    pub final_level: usize,
}

/// Runs one trajectory until the all-ones optimum or `cap` steps, invoking
/// `on_level(t, level)` at t = 0 for the initial point and after every step.
///
/// Deterministic for a given `(cfg, f, start, seed, cap)`.
pub fn drive_trial<F>(
    cfg: &AlgorithmConfig,
    f: &FitnessFunction,
    start: &Start,
    seed: u64,
    cap: u64,
    mut on_level: F,
) -> Result<TrialOutcome>
where
    F: FnMut(u64, usize),
{
    if cap == 0 {
        return Err(invalid("cap", "step cap must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = start.resolve(f, &mut rng)?;
    let mut state = SearchState::new(f, x)?;
    let n = f.n();
    on_level(0, state.level());
    if state.level() == n {
        return Ok(TrialOutcome { steps: 0, hit_optimum: true, final_level: n });
    }
    let mut flips = Vec::new();
    loop {
        let ev = step_with_buffer(&mut state, cfg, f, &mut rng, &mut flips);
        on_level(state.step_count(), ev.level_after);
        if ev.level_after == n {
            return Ok(TrialOutcome {
                steps: state.step_count(),
                hit_optimum: true,
                final_level: n,
            });
        }
        if state.step_count() >= cap {
            return Ok(TrialOutcome {
                steps: state.step_count(),
                hit_optimum: false,
                final_level: ev.level_after,
            });
        }
    }
}

/// Compact trajectory record: the level after each step (index 0 is the
/// initial level), total steps, and whether the optimum was reached.
///
/// A capped run is flagged by `hit_optimum == false`; aggregators must treat
/// it as censored rather than averaging it in silently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrajectorySummary {
    pub levels: Vec<u32>,
    pub steps: u64,
    pub hit_optimum: bool,
}

/// Runs one trajectory and records the full level sequence. Intended for
/// desk-scale caps; use [`drive_trial`] with a callback to stream instead.
pub fn run_trial_raw(
    cfg: &AlgorithmConfig,
    f: &FitnessFunction,
    start: &Start,
    seed: u64,
    cap: u64,
) -> Result<TrajectorySummary> {
    let mut levels = Vec::new();
    let outcome = drive_trial(cfg, f, start, seed, cap, |_, level| {
        levels.push(level as u32);
    })?;
    Ok(TrajectorySummary {
        levels,
        steps: outcome.steps,
        hit_optimum: outcome.hit_optimum,
    })
}
