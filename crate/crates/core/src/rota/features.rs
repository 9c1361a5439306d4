use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::instance::Instance;
use super::state::{circuit_probe, AssignmentState, ColumnStatus, Move};
use crate::error::{Error, Result};
use crate::gf2;

/// The move features read by the scoring policies.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureVector {
    pub is_terminate_move: f64,
    /// Full columns before the move.
    pub global_num_full_cols: f64,
    pub delta_num_valid: f64,
    pub target_col_becomes_full: f64,
    /// Some touched column was full before the move and is not after it.
    pub source_col_was_full_and_is_not_anymore: f64,
    pub is_repair_move: f64,
    pub is_insert_move: f64,
    pub target_rank_deficit_after: f64,
    pub source_rank_deficit_after: f64,
    /// Circuit size after the move, or 0; see [`CircuitFeature`].
    pub circuit_size: f64,
    pub target_dup_count_after: f64,
    pub rank: f64,
    pub progress_ratio: f64,
}

impl FeatureVector {
    pub const KEYS: [&'static str; 13] = [
        "is_terminate_move",
        "global_num_full_cols",
        "delta_num_valid",
        "target_col_becomes_full",
        "source_col_was_full_and_is_not_anymore",
        "is_repair_move",
        "is_insert_move",
        "target_rank_deficit_after",
        "source_rank_deficit_after",
        "circuit_size",
        "target_dup_count_after",
        "rank",
        "progress_ratio",
    ];

    fn slots(&mut self) -> [&mut f64; 13] {
        [
            &mut self.is_terminate_move,
            &mut self.global_num_full_cols,
            &mut self.delta_num_valid,
            &mut self.target_col_becomes_full,
            &mut self.source_col_was_full_and_is_not_anymore,
            &mut self.is_repair_move,
            &mut self.is_insert_move,
            &mut self.target_rank_deficit_after,
            &mut self.source_rank_deficit_after,
            &mut self.circuit_size,
            &mut self.target_dup_count_after,
            &mut self.rank,
            &mut self.progress_ratio,
        ]
    }

    pub fn to_map(&self) -> BTreeMap<String, f64> {
        let mut copy = *self;
        Self::KEYS
            .iter()
            .zip(copy.slots())
            .map(|(k, v)| (k.to_string(), *v))
            .collect()
    }

    /// Builds a vector from named values; every key must be known and present.
    pub fn from_map(map: &BTreeMap<String, f64>) -> Result<Self> {
        if let Some(k) = map.keys().find(|k| !Self::KEYS.contains(&k.as_str())) {
            return Err(Error::UnknownFeature(k.clone()));
        }
        let mut f = Self::default();
        for (key, slot) in Self::KEYS.iter().zip(f.slots()) {
            *slot = *map
                .get(*key)
                .ok_or_else(|| Error::MissingFeature(key.to_string()))?;
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, Copy)]
struct ColumnEval {
    status: ColumnStatus,
    circuit: usize,
}

/// Which column the `circuit_size` feature describes after a move.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircuitFeature {
    /// The target column, for every move kind.
    #[default]
    Target,
    /// The source column for repairs, the target column for inserts.
    RepairSource,
}

/// Feature extraction for every move of one state, with a rollout-wide cache
/// of column evaluations keyed by the column's sorted vectors.
#[derive(Debug, Default)]
pub struct FeatureExtractor {
    cache: HashMap<Vec<u64>, ColumnEval>,
    circuit_feature: CircuitFeature,
}

/// Per-state context shared by all candidate moves.
#[derive(Debug, Clone)]
pub struct StateSummary {
    before: Vec<ColumnStatus>,
    full: usize,
    valid: usize,
}

impl StateSummary {
    pub fn of(state: &AssignmentState, inst: &Instance) -> Self {
        let before: Vec<ColumnStatus> = (0..state.rank())
            .map(|j| state.column_status(inst, j))
            .collect();
        let full = before.iter().filter(|s| s.full).count();
        let valid = before.iter().filter(|s| s.valid()).count();
        Self {
            before,
            full,
            valid,
        }
    }

    pub fn full_count(&self) -> usize {
        self.full
    }

    pub fn valid_count(&self) -> usize {
        self.valid
    }

    pub fn column(&self, j: usize) -> ColumnStatus {
        self.before[j]
    }
}

impl FeatureExtractor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_circuit_feature(circuit_feature: CircuitFeature) -> Self {
        Self {
            circuit_feature,
            ..Self::default()
        }
    }

    fn eval(&mut self, vecs: &[u64], n: usize) -> ColumnEval {
        let mut key = vecs.to_vec();
        key.sort_unstable();
        *self.cache.entry(key).or_insert_with(|| {
            let status = ColumnStatus::of(vecs, n);
            let circuit = if status.valid() {
                0
            } else {
                gf2::find_circuit_packed(vecs, circuit_probe(n)).map_or(0, |c| c.len())
            };
            ColumnEval { status, circuit }
        })
    }

    /// Features of `mv` applied to `state`; `mv` must be legal.
    pub fn extract(
        &mut self,
        state: &AssignmentState,
        inst: &Instance,
        summary: &StateSummary,
        mv: Move,
    ) -> FeatureVector {
        let n = state.rank();
        let mut f = FeatureVector {
            global_num_full_cols: summary.full as f64,
            rank: n as f64,
            progress_ratio: summary.full as f64 / n as f64,
            ..FeatureVector::default()
        };
        let (target, source) = match mv {
            Move::Terminate => {
                f.is_terminate_move = 1.0;
                return f;
            }
            Move::Insert { col, .. } => {
                f.is_insert_move = 1.0;
                (col, None)
            }
            Move::Repair { source, target, .. } => {
                f.is_repair_move = 1.0;
                (target, Some(source))
            }
        };
        let mut after = state.clone();
        after.apply_unchecked(mv);
        let touched: Vec<usize> = std::iter::once(target).chain(source).collect();
        let mut delta_valid = 0i64;
        for &j in &touched {
            let was = summary.before[j];
            let now = self.eval(&after.column(inst, j).0, n);
            delta_valid += i64::from(now.status.valid()) - i64::from(was.valid());
            if was.full && !now.status.full {
                f.source_col_was_full_and_is_not_anymore = 1.0;
            }
            if j == target {
                f.circuit_size = now.circuit as f64;
                f.target_col_becomes_full = f64::from(u8::from(now.status.full && !was.full));
                f.target_rank_deficit_after = now.status.deficit() as f64;
                f.target_dup_count_after = now.status.dup as f64;
            } else {
                f.source_rank_deficit_after = now.status.deficit() as f64;
            }
        }
        f.delta_num_valid = delta_valid as f64;
        if let (CircuitFeature::RepairSource, Some(src)) = (self.circuit_feature, source) {
            f.circuit_size = self.eval(&after.column(inst, src).0, n).circuit as f64;
        }
        f
    }
}

/// Features of a single move, checking legality first.
pub fn extract_features(
    state: &AssignmentState,
    inst: &Instance,
    mv: Move,
) -> Result<FeatureVector> {
    state.clone().apply(inst, mv)?;
    let summary = StateSummary::of(state, inst);
    Ok(FeatureExtractor::new().extract(state, inst, &summary, mv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::Gf2Vec;
    use crate::rota::instance::{InstanceKind, PoolMode, Provenance};

    fn instance(rows: &[[u64; 3]]) -> Instance {
        let bases = rows
            .iter()
            .map(|r| r.iter().map(|&w| Gf2Vec::from_word(3, w)).collect())
            .collect();
        Instance::new(
            bases,
            Provenance {
                seed: 0,
                kind: InstanceKind::Generic,
                pool: PoolMode::Fixed,
            },
        )
        .unwrap()
    }

    #[test]
    fn map_round_trip_and_key_guard() {
        let f = FeatureVector {
            rank: 5.0,
            circuit_size: 3.0,
            ..Default::default()
        };
        let mut map = f.to_map();
        assert_eq!(map.len(), 13);
        assert_eq!(FeatureVector::from_map(&map).unwrap(), f);
        map.insert("girth".into(), 1.0);
        assert!(
            matches!(FeatureVector::from_map(&map), Err(Error::UnknownFeature(k)) if k == "girth")
        );
        map.remove("girth");
        map.remove("rank");
        assert!(matches!(
            FeatureVector::from_map(&map),
            Err(Error::MissingFeature(_))
        ));
    }

    #[test]
    fn insert_features() {
        let inst = instance(&[[1, 2, 4], [2, 1, 4], [4, 1, 2]]);
        let mut s = AssignmentState::empty(3);
        s.apply(
            &inst,
            Move::Insert {
                row: 0,
                col: 0,
                index: 0,
            },
        )
        .unwrap();
        s.apply(
            &inst,
            Move::Insert {
                row: 1,
                col: 0,
                index: 0,
            },
        )
        .unwrap();
        let done = extract_features(
            &s,
            &inst,
            Move::Insert {
                row: 2,
                col: 0,
                index: 0,
            },
        )
        .unwrap();
        assert_eq!(done.target_col_becomes_full, 1.0);
        assert_eq!(done.delta_num_valid, 0.0);
        assert_eq!(done.circuit_size, 0.0);
        let parallel = extract_features(
            &s,
            &inst,
            Move::Insert {
                row: 2,
                col: 0,
                index: 1,
            },
        )
        .unwrap();
        assert_eq!(parallel.target_dup_count_after, 1.0);
        assert_eq!(parallel.circuit_size, 2.0);
        assert_eq!(parallel.delta_num_valid, -1.0);
        assert_eq!(parallel.is_insert_move, 1.0);
        assert!(extract_features(
            &s,
            &inst,
            Move::Insert {
                row: 0,
                col: 1,
                index: 0
            }
        )
        .is_err());
    }

    #[test]
    fn repair_resolving_a_three_circuit() {
        // Column 0 = {1, 2, 3} (a 3-circuit); column 1 = {4} from row 1.
        let inst = instance(&[[1, 2, 4], [2, 4, 1], [3, 1, 4]]);
        let s = AssignmentState::from_matrix(&[vec![0, -1, -1], vec![0, 1, -1], vec![0, -1, -1]])
            .unwrap();
        let mv = Move::Repair {
            source: 0,
            target: 1,
            row: 1,
        };
        let f = extract_features(&s, &inst, mv).unwrap();
        // Column 0 becomes {1, 4, 3}, column 1 becomes {2}.
        let mut after = s.clone();
        after.apply(&inst, mv).unwrap();
        for j in 0..2 {
            let (vecs, _) = after.column(&inst, j);
            let owned: Vec<Gf2Vec> = vecs.iter().map(|&w| Gf2Vec::from_word(3, w)).collect();
            assert!(gf2::find_circuit(&owned, None).unwrap().is_none());
        }
        assert_eq!(f.circuit_size, 0.0);
        assert_eq!(f.delta_num_valid, 1.0);
        assert_eq!(f.source_rank_deficit_after, 0.0);
        assert_eq!(f.target_col_becomes_full, 0.0);
        assert_eq!(f.is_repair_move, 1.0);
    }

    #[test]
    fn circuit_feature_modes() {
        // Column 0 = {1, 2, 3, 1}: moving row 3's copy of 1 out leaves the 3-circuit behind.
        let inst = Instance::new(
            [[1u64, 2, 4, 8], [2, 1, 4, 8], [3, 1, 4, 8], [1, 2, 4, 8]]
                .iter()
                .map(|r| r.iter().map(|&w| Gf2Vec::from_word(4, w)).collect())
                .collect(),
            Provenance {
                seed: 0,
                kind: InstanceKind::Generic,
                pool: PoolMode::Fixed,
            },
        )
        .unwrap();
        let s = AssignmentState::from_matrix(&[
            vec![0, -1, -1, -1],
            vec![0, -1, -1, -1],
            vec![0, -1, -1, -1],
            vec![0, -1, -1, -1],
        ])
        .unwrap();
        let mv = Move::Repair {
            source: 0,
            target: 1,
            row: 3,
        };
        let summary = StateSummary::of(&s, &inst);
        let target = FeatureExtractor::new().extract(&s, &inst, &summary, mv);
        let source = FeatureExtractor::with_circuit_feature(CircuitFeature::RepairSource)
            .extract(&s, &inst, &summary, mv);
        assert_eq!(target.circuit_size, 0.0);
        assert_eq!(source.circuit_size, 3.0);
    }
}
