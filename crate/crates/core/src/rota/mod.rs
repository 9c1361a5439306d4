//! Greedy local-exchange search for rainbow bases over GF(2).
//!
//! An instance is `n` bases of GF(2)^n. The engine fills an `n x n` grid,
//! one row basis per row, by inserting elements and swapping them between
//! columns, until every column is itself a basis.

mod engine;
mod features;
mod instance;
mod policy;
mod state;

pub use engine::{
    fitness, greedy_rollout, greedy_rollout_with, is_solution, Counters, FitnessWeights, Policy,
    Rollout, Scorer,
};
pub use features::{
    extract_features, CircuitFeature, FeatureExtractor, FeatureVector, StateSummary,
};
pub use instance::{
    gen_instance, gen_pool, variable_rank_pool_size, Instance, InstanceKind, PoolMode, Provenance,
    MAX_RANK, RANK5_POOL_SIZE,
};
pub use policy::{Noise, PolicyId, CURSED_MODULUS, FORTUNATE_MODULUS};
pub use state::{circuit_probe, AssignmentState, ColumnStatus, Move, PROBE_CIRCUIT_SIZE};
