use serde::{Deserialize, Serialize};

use super::features::{CircuitFeature, FeatureExtractor, FeatureVector, StateSummary};
use super::instance::Instance;
use super::policy::{Noise, PolicyId};
use super::state::{AssignmentState, Move};
use crate::error::{Error, Result};
use crate::gf2::{self, Gf2Vec};
use crate::rng::{stream, Purpose};

/// A policy together with whether its random terms are live.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Policy {
    pub id: PolicyId,
    pub randomized: bool,
}

impl Policy {
    pub fn new(id: PolicyId) -> Self {
        Self {
            id,
            randomized: true,
        }
    }

    pub fn derandomized(id: PolicyId) -> Self {
        Self {
            id,
            randomized: false,
        }
    }
}

/// Anything that scores move features.
pub trait Scorer: Sync {
    fn score(&self, f: &FeatureVector, noise: &mut Noise) -> f64;
    /// Whether the scorer's random terms draw from a live stream.
    fn randomized(&self) -> bool;
}

impl Scorer for Policy {
    fn score(&self, f: &FeatureVector, noise: &mut Noise) -> f64 {
        self.id.score(f, noise)
    }

    fn randomized(&self) -> bool {
        self.randomized
    }
}

/// Event counts of one rollout.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub steps: usize,
    /// Columns turning full, summed over all moves.
    pub completions: usize,
    /// Columns that stop being full, summed over all moves.
    pub breaks: usize,
    pub repairs: usize,
    pub final_valid: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rollout {
    pub success: bool,
    pub terminated: bool,
    pub counters: Counters,
    pub trajectory: Vec<Move>,
    pub final_state: AssignmentState,
}

/// Greedy local-exchange construction from the empty grid.
///
/// Each step scores every legal move and applies the first maximum in move
/// order. Choosing `Terminate` ends the rollout. Success is decided by
/// recomputing every column's rank at the end.
pub fn greedy_rollout<S: Scorer + ?Sized>(
    inst: &Instance,
    policy: &S,
    step_limit: usize,
    seed: u64,
) -> Result<Rollout> {
    greedy_rollout_with(inst, policy, step_limit, seed, CircuitFeature::Target)
}

/// [`greedy_rollout`] with a choice of what `circuit_size` describes.
pub fn greedy_rollout_with<S: Scorer + ?Sized>(
    inst: &Instance,
    policy: &S,
    step_limit: usize,
    seed: u64,
    circuit_feature: CircuitFeature,
) -> Result<Rollout> {
    if step_limit == 0 {
        return Err(Error::TooSmall {
            what: "step limit",
            min: 1,
            got: 0,
        });
    }
    let n = inst.rank();
    let mut noise = if policy.randomized() {
        Noise::Stream(stream(seed, Purpose::PolicyNoise, 0))
    } else {
        Noise::Off
    };
    let mut extractor = FeatureExtractor::with_circuit_feature(circuit_feature);
    let mut state = AssignmentState::empty(n);
    let mut counters = Counters::default();
    let mut trajectory = Vec::new();
    let mut terminated = false;
    let mut summary = StateSummary::of(&state, inst);
    for _ in 0..step_limit {
        if summary.full_count() == n {
            break;
        }
        let mut best: Option<(f64, Move)> = None;
        for mv in state.legal_moves(inst) {
            let f = extractor.extract(&state, inst, &summary, mv);
            let s = policy.score(&f, &mut noise);
            if best.is_none_or(|(b, _)| s > b) {
                best = Some((s, mv));
            }
        }
        let (_, mv) = best.expect("Terminate is always legal");
        counters.steps += 1;
        trajectory.push(mv);
        if mv == Move::Terminate {
            terminated = true;
            break;
        }
        state.apply_unchecked(mv);
        debug_assert!(state.validate().is_ok());
        let next = StateSummary::of(&state, inst);
        for j in 0..n {
            let (was, now) = (summary.column(j).full, next.column(j).full);
            counters.completions += usize::from(now && !was);
            counters.breaks += usize::from(was && !now);
        }
        counters.repairs += usize::from(matches!(mv, Move::Repair { .. }));
        summary = next;
    }
    counters.final_valid = summary.valid_count();
    let success = is_solution(&state, inst);
    Ok(Rollout {
        success,
        terminated,
        counters,
        trajectory,
        final_state: state,
    })
}

/// Every column is a basis, checked with the general rank routine.
pub fn is_solution(state: &AssignmentState, inst: &Instance) -> bool {
    let n = inst.rank();
    (0..n).all(|j| {
        let (vecs, _) = state.column(inst, j);
        let owned: Vec<Gf2Vec> = vecs.iter().map(|&w| Gf2Vec::from_word(n, w)).collect();
        owned.len() == n && gf2::rank(&owned).expect("equal lengths") == n
    })
}

/// Coefficients of the rollout fitness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitnessWeights {
    /// Step-fraction penalty.
    pub alpha: f64,
    /// Per column completion.
    pub beta: f64,
    /// Per full column broken.
    pub gamma: f64,
    /// Per repair move.
    pub delta: f64,
    /// Final valid-column fraction.
    pub epsilon: f64,
}

impl FitnessWeights {
    pub const FIXED_RANK: Self = Self {
        alpha: 0.10,
        beta: 0.06,
        gamma: 0.12,
        delta: 0.02,
        epsilon: 0.03,
    };
    pub const VARIABLE_RANK: Self = Self {
        gamma: 0.20,
        ..Self::FIXED_RANK
    };
    pub const ZERO: Self = Self {
        alpha: 0.0,
        beta: 0.0,
        gamma: 0.0,
        delta: 0.0,
        epsilon: 0.0,
    };

    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha, self.beta, self.gamma, self.delta, self.epsilon];
        if all.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Config(format!(
                "fitness weights must be nonnegative: {self:?}"
            )));
        }
        Ok(())
    }
}

pub fn fitness(
    success: bool,
    counters: &Counters,
    weights: &FitnessWeights,
    step_limit: usize,
    n: usize,
) -> f64 {
    f64::from(u8::from(success)) + weights.beta * counters.completions as f64
        - weights.gamma * counters.breaks as f64
        - weights.delta * counters.repairs as f64
        + weights.epsilon * counters.final_valid as f64 / n as f64
        - weights.alpha * counters.steps as f64 / step_limit as f64
}
