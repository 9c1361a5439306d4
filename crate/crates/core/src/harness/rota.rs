use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, Purpose};
use crate::rota::{
    fitness, gen_instance, gen_pool, greedy_rollout_with, variable_rank_pool_size, CircuitFeature,
    Counters, FeatureVector, FitnessWeights, InstanceKind, Noise, PoolMode, Scorer,
    RANK5_POOL_SIZE,
};

/// The named benchmark presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bench {
    #[serde(rename = "A-fixed")]
    AFixed,
    #[serde(rename = "A-random")]
    ARandom,
    B,
    C,
}

impl Bench {
    pub const ALL: [Bench; 4] = [Bench::AFixed, Bench::ARandom, Bench::B, Bench::C];

    pub fn config(self) -> BenchConfig {
        let a = |pool| BenchConfig {
            ranks: vec![5],
            instances_per_rank: 200,
            step_limit: StepLimit::Fixed(200),
            rollouts: 3,
            pool,
            pool_size: PoolSize::Fixed(RANK5_POOL_SIZE),
            weights: FitnessWeights::FIXED_RANK,
            circuit_feature: CircuitFeature::Target,
        };
        match self {
            Bench::AFixed => a(PoolMode::Fixed),
            Bench::ARandom => a(PoolMode::Randomized),
            Bench::B => BenchConfig {
                ranks: vec![7],
                instances_per_rank: 100,
                step_limit: StepLimit::Fixed(350),
                rollouts: 3,
                pool: PoolMode::Randomized,
                pool_size: PoolSize::TwiceRankPlusTwo,
                weights: FitnessWeights::FIXED_RANK,
                circuit_feature: CircuitFeature::Target,
            },
            Bench::C => BenchConfig {
                ranks: vec![5, 7, 9, 11, 13],
                instances_per_rank: 12,
                step_limit: StepLimit::PerRank(20),
                rollouts: 1,
                pool: PoolMode::Randomized,
                pool_size: PoolSize::VariableRank,
                weights: FitnessWeights::VARIABLE_RANK,
                circuit_feature: CircuitFeature::Target,
            },
        }
    }
}

impl fmt::Display for Bench {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bench::AFixed => "A-fixed",
            Bench::ARandom => "A-random",
            Bench::B => "B",
            Bench::C => "C",
        })
    }
}

impl FromStr for Bench {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Bench::ALL
            .into_iter()
            .find(|b| b.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown bench {s:?}; expected A-fixed, A-random, B or C"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepLimit {
    Fixed(usize),
    /// This many steps per unit of rank.
    PerRank(usize),
}

impl StepLimit {
    pub fn for_rank(self, n: usize) -> usize {
        match self {
            StepLimit::Fixed(k) => k,
            StepLimit::PerRank(k) => k * n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolSize {
    Fixed(usize),
    TwiceRankPlusTwo,
    /// `ceil(2.2 n)`.
    VariableRank,
}

impl PoolSize {
    pub fn for_rank(self, n: usize) -> usize {
        match self {
            PoolSize::Fixed(k) => k,
            PoolSize::TwiceRankPlusTwo => 2 * n + 2,
            PoolSize::VariableRank => variable_rank_pool_size(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub ranks: Vec<usize>,
    /// The first half of each rank's instances are generic, the rest traps.
    pub instances_per_rank: usize,
    pub step_limit: StepLimit,
    pub rollouts: usize,
    pub pool: PoolMode,
    pub pool_size: PoolSize,
    pub weights: FitnessWeights,
    #[serde(default)]
    pub circuit_feature: CircuitFeature,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rollouts == 0 {
            return Err(Error::TooSmall {
                what: "rollouts",
                min: 1,
                got: 0,
            });
        }
        if self.ranks.is_empty() {
            return Err(Error::Config("a bench needs at least one rank".into()));
        }
        self.weights.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceOutcome {
    pub rank: usize,
    pub kind: InstanceKind,
    pub seed: u64,
    pub rollout_success: Vec<bool>,
    pub rollout_fitness: Vec<f64>,
    pub counters: Vec<Counters>,
    /// Strict majority of rollouts succeeded.
    pub success: bool,
    pub mean_fitness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotaBenchReport {
    pub config: BenchConfig,
    pub seed: u64,
    pub fitness_generic: f64,
    pub fitness_structured: f64,
    pub overall_success_rate: f64,
    pub average_score: f64,
    pub outcomes: Vec<InstanceOutcome>,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Majority vote over rollouts; with one rollout this is that rollout's result.
pub fn majority(successes: &[bool]) -> bool {
    2 * successes.iter().filter(|&&s| s).count() > successes.len()
}

fn run_instance<S: Scorer + ?Sized>(
    scorer: &S,
    config: &BenchConfig,
    seed: u64,
    n: usize,
    i: usize,
) -> Result<InstanceOutcome> {
    let kind = if i < config.instances_per_rank / 2 {
        InstanceKind::Generic
    } else {
        InstanceKind::Trap
    };
    let inst_seed = derive_seed(seed, Purpose::Instance, ((n as u64) << 32) | i as u64);
    let pool = gen_pool(n, config.pool_size.for_rank(n), config.pool, inst_seed)?;
    let inst = gen_instance(&pool, n, kind, config.pool, inst_seed)?;
    let limit = config.step_limit.for_rank(n);
    let mut outcome = InstanceOutcome {
        rank: n,
        kind,
        seed: inst_seed,
        rollout_success: Vec::new(),
        rollout_fitness: Vec::new(),
        counters: Vec::new(),
        success: false,
        mean_fitness: 0.0,
    };
    for r in 0..config.rollouts {
        let roll_seed = derive_seed(inst_seed, Purpose::Rollout, r as u64);
        let roll = greedy_rollout_with(&inst, scorer, limit, roll_seed, config.circuit_feature)?;
        outcome.rollout_fitness.push(fitness(
            roll.success,
            &roll.counters,
            &config.weights,
            limit,
            n,
        ));
        outcome.rollout_success.push(roll.success);
        outcome.counters.push(roll.counters);
    }
    outcome.success = majority(&outcome.rollout_success);
    outcome.mean_fitness = mean(outcome.rollout_fitness.iter().copied());
    Ok(outcome)
}

/// Runs every instance of `config` in parallel and aggregates in instance order.
pub fn evaluate_rota<S: Scorer + ?Sized>(
    scorer: &S,
    config: &BenchConfig,
    seed: u64,
) -> Result<RotaBenchReport> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = config
        .ranks
        .iter()
        .flat_map(|&n| (0..config.instances_per_rank).map(move |i| (n, i)))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(n, i)| run_instance(scorer, config, seed, n, i))
        .collect::<Result<Vec<_>>>()?;
    let stream_fitness = |k: InstanceKind| {
        mean(
            outcomes
                .iter()
                .filter(|o| o.kind == k)
                .map(|o| o.mean_fitness),
        )
    };
    Ok(RotaBenchReport {
        config: config.clone(),
        seed,
        fitness_generic: stream_fitness(InstanceKind::Generic),
        fitness_structured: stream_fitness(InstanceKind::Trap),
        overall_success_rate: mean(outcomes.iter().map(|o| f64::from(u8::from(o.success)))),
        average_score: mean(outcomes.iter().map(|o| o.mean_fitness)),
        outcomes,
    })
}

/// A scorer that prefers stopping to every other move.
#[derive(Debug, Clone, Copy, Default)]
pub struct AlwaysTerminate;

impl Scorer for AlwaysTerminate {
    fn score(&self, f: &FeatureVector, _noise: &mut Noise) -> f64 {
        f.is_terminate_move
    }

    fn randomized(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rota::{Policy, PolicyId};

    fn small(bench: Bench, per_rank: usize) -> BenchConfig {
        BenchConfig {
            instances_per_rank: per_rank,
            ..bench.config()
        }
    }

    #[test]
    fn presets() {
        let c = Bench::C.config();
        assert_eq!(c.step_limit.for_rank(13), 260);
        assert_eq!(c.pool_size.for_rank(5), 11);
        assert_eq!(c.weights.gamma, 0.20);
        assert_eq!(Bench::B.config().pool_size.for_rank(7), 16);
        for b in Bench::ALL {
            assert_eq!(b.to_string().parse::<Bench>().unwrap(), b);
            assert!(b.config().validate().is_ok());
        }
        assert!("D".parse::<Bench>().is_err());
    }

    #[test]
    fn majority_vote() {
        assert!(majority(&[true, false, true]));
        assert!(!majority(&[true, false, false]));
        assert!(majority(&[true]));
        assert!(!majority(&[false]));
    }

    #[test]
    fn always_terminate_never_succeeds() {
        let r = evaluate_rota(&AlwaysTerminate, &small(Bench::AFixed, 10), 1).unwrap();
        assert_eq!(r.overall_success_rate, 0.0);
        assert!(r
            .outcomes
            .iter()
            .all(|o| o.counters.iter().all(|c| c.steps == 1)));
    }

    #[test]
    fn single_rollout_success_is_the_rollout() {
        let config = BenchConfig {
            rollouts: 1,
            ..small(Bench::B, 4)
        };
        let r = evaluate_rota(&Policy::new(PolicyId::Rank7), &config, 3).unwrap();
        for o in &r.outcomes {
            assert_eq!(o.success, o.rollout_success[0]);
        }
        assert_eq!(
            r.outcomes
                .iter()
                .filter(|o| o.kind == InstanceKind::Trap)
                .count(),
            2
        );
    }

    #[test]
    fn reports_are_deterministic() {
        let config = small(Bench::ARandom, 6);
        let a = evaluate_rota(&Policy::new(PolicyId::Rank5), &config, 9).unwrap();
        let b = evaluate_rota(&Policy::new(PolicyId::Rank5), &config, 9).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert!((0.0..=1.0).contains(&a.overall_success_rate));
    }
}
