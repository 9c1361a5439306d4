use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::instance::Instance;
use crate::error::{Error, Result};
use crate::gf2;

/// Largest size of the circuits searched for in probe mode.
pub const PROBE_CIRCUIT_SIZE: usize = 4;

/// Circuit search mode for a given rank: exhaustive up to the full-search
/// limit, probing sizes `2..=4` beyond it.
pub fn circuit_probe(rank: usize) -> Option<usize> {
    (rank > gf2::FULL_SEARCH_LIMIT).then_some(PROBE_CIRCUIT_SIZE)
}

/// An `n x n` grid; cell `(i, j)` names which element of row basis `i` sits in column `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AssignmentState {
    n: usize,
    cells: Vec<Option<u8>>,
}

impl AssignmentState {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            cells: vec![None; n * n],
        }
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Option<usize> {
        self.cells[row * self.n + col].map(usize::from)
    }

    fn set(&mut self, row: usize, col: usize, index: Option<usize>) {
        self.cells[row * self.n + col] = index.map(|k| k as u8);
    }

    pub fn row_uses(&self, row: usize, index: usize) -> bool {
        (0..self.n).any(|j| self.get(row, j) == Some(index))
    }

    /// Checks shape and row distinctness.
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.n {
            let mut seen = vec![false; self.n];
            for j in 0..self.n {
                if let Some(k) = self.get(i, j) {
                    if k >= self.n || seen[k] {
                        return Err(Error::IllegalMove(format!(
                            "row {i} repeats or overflows index {k}"
                        )));
                    }
                    seen[k] = true;
                }
            }
        }
        Ok(())
    }

    /// Packed vectors of column `col`, in row order, with the rows they come from.
    pub fn column(&self, inst: &Instance, col: usize) -> (Vec<u64>, Vec<usize>) {
        let mut vecs = Vec::with_capacity(self.n);
        let mut rows = Vec::with_capacity(self.n);
        for i in 0..self.n {
            if let Some(k) = self.get(i, col) {
                vecs.push(inst.element(i, k));
                rows.push(i);
            }
        }
        (vecs, rows)
    }

    pub fn column_status(&self, inst: &Instance, col: usize) -> ColumnStatus {
        ColumnStatus::of(&self.column(inst, col).0, self.n)
    }

    /// Applies `mv` after checking it is legal in this state.
    pub fn apply(&mut self, inst: &Instance, mv: Move) -> Result<()> {
        self.check(inst, mv)?;
        self.apply_unchecked(mv);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, mv: Move) {
        match mv {
            Move::Insert { row, col, index } => self.set(row, col, Some(index)),
            Move::Repair {
                source,
                target,
                row,
            } => {
                let (a, b) = (self.get(row, source), self.get(row, target));
                self.set(row, source, b);
                self.set(row, target, a);
            }
            Move::Terminate => {}
        }
    }

    fn check(&self, inst: &Instance, mv: Move) -> Result<()> {
        let n = self.n;
        match mv {
            Move::Insert { row, col, index } => {
                if row >= n || col >= n || index >= n {
                    return Err(Error::IllegalMove(format!("{mv:?} out of range")));
                }
                if self.get(row, col).is_some() || self.row_uses(row, index) {
                    return Err(Error::IllegalMove(format!(
                        "{mv:?} needs an empty slot and an unused index"
                    )));
                }
            }
            Move::Repair {
                source,
                target,
                row,
            } => {
                if source >= n || target >= n || row >= n || source == target {
                    return Err(Error::IllegalMove(format!("{mv:?} out of range")));
                }
                let (vecs, rows) = self.column(inst, source);
                let circuit =
                    gf2::find_circuit_packed(&vecs, circuit_probe(n)).ok_or_else(|| {
                        Error::IllegalMove(format!("{mv:?}: source column is independent"))
                    })?;
                if !circuit.iter().any(|&c| rows[c] == row) {
                    return Err(Error::IllegalMove(format!(
                        "{mv:?}: row is not on the source circuit"
                    )));
                }
            }
            Move::Terminate => {}
        }
        Ok(())
    }

    /// Every legal move, in the engine's tie-breaking order.
    pub fn legal_moves(&self, inst: &Instance) -> Vec<Move> {
        let n = self.n;
        let mut moves = Vec::new();
        for row in 0..n {
            let free: Vec<usize> = (0..n).filter(|&k| !self.row_uses(row, k)).collect();
            for col in (0..n).filter(|&j| self.get(row, j).is_none()) {
                moves.extend(free.iter().map(|&index| Move::Insert { row, col, index }));
            }
        }
        for source in 0..n {
            let (vecs, rows) = self.column(inst, source);
            let Some(circuit) = gf2::find_circuit_packed(&vecs, circuit_probe(n)) else {
                continue;
            };
            for target in (0..n).filter(|&t| t != source) {
                moves.extend(circuit.iter().map(|&c| Move::Repair {
                    source,
                    target,
                    row: rows[c],
                }));
            }
        }
        moves.sort_unstable();
        moves.push(Move::Terminate);
        moves
    }

    pub fn full_count(&self, inst: &Instance) -> usize {
        (0..self.n)
            .filter(|&j| self.column_status(inst, j).full)
            .count()
    }

    pub fn to_matrix(&self) -> Vec<Vec<i32>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.get(i, j).map_or(-1, |k| k as i32))
                    .collect()
            })
            .collect()
    }

    pub fn from_matrix(rows: &[Vec<i32>]) -> Result<Self> {
        let n = rows.len();
        let mut state = Self::empty(n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
            for (j, &x) in r.iter().enumerate() {
                match x {
                    -1 => {}
                    k if k >= 0 && (k as usize) < n => state.set(i, j, Some(k as usize)),
                    k => return Err(Error::IllegalMove(format!("cell ({i}, {j}) holds {k}"))),
                }
            }
        }
        state.validate()?;
        Ok(state)
    }
}

impl Serialize for AssignmentState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_matrix().serialize(s)
    }
}

impl<'de> Deserialize<'de> for AssignmentState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<i32>>::deserialize(d)?;
        AssignmentState::from_matrix(&rows).map_err(serde::de::Error::custom)
    }
}

/// A local move. The derived order is the engine's tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Move {
    /// Put element `index` of row basis `row` into empty slot `(row, col)`.
    Insert {
        row: usize,
        col: usize,
        index: usize,
    },
    /// Swap row `row`'s entries between a dependent `source` column and `target`.
    Repair {
        source: usize,
        target: usize,
        row: usize,
    },
    Terminate,
}

/// Rank data of one column set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnStatus {
    pub size: usize,
    pub rank: usize,
    pub dup: usize,
    pub full: bool,
}

impl ColumnStatus {
    pub fn of(vecs: &[u64], n: usize) -> Self {
        let rank = gf2::rank_packed(vecs);
        let size = vecs.len();
        Self {
            size,
            rank,
            dup: gf2::dup_count_packed(vecs),
            full: rank == size && size == n,
        }
    }

    pub fn deficit(&self) -> usize {
        self.size - self.rank
    }

    pub fn valid(&self) -> bool {
        self.rank == self.size
    }
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
    fn column_status_examples() {
        let inst = instance(&[[1, 2, 4], [1, 2, 4], [1, 2, 4]]);
        let mut s = AssignmentState::empty(3);
        let empty = s.column_status(&inst, 0);
        assert!(empty.valid() && !empty.full && empty.size == 0);
        for i in 0..3 {
            s.apply(
                &inst,
                Move::Insert {
                    row: i,
                    col: 0,
                    index: i,
                },
            )
            .unwrap();
        }
        assert!(s.column_status(&inst, 0).full);
        s.apply(
            &inst,
            Move::Insert {
                row: 0,
                col: 1,
                index: 1,
            },
        )
        .unwrap();
        s.apply(
            &inst,
            Move::Insert {
                row: 2,
                col: 1,
                index: 1,
            },
        )
        .unwrap();
        let dup = s.column_status(&inst, 1);
        assert!(dup.deficit() >= 1 && dup.dup >= 1);
    }

    #[test]
    fn empty_state_moves() {
        let inst = instance(&[[1, 2, 4], [3, 2, 4], [1, 6, 4]]);
        let moves = AssignmentState::empty(3).legal_moves(&inst);
        assert_eq!(moves.len(), 27 + 1);
        assert_eq!(
            moves[0],
            Move::Insert {
                row: 0,
                col: 0,
                index: 0
            }
        );
        assert_eq!(*moves.last().unwrap(), Move::Terminate);
    }

    #[test]
    fn repairs_follow_the_circuit() {
        // Column 0 holds 1, 2, 3: a 3-circuit.
        let inst = instance(&[[1, 2, 4], [2, 1, 4], [3, 1, 4]]);
        let mut s = AssignmentState::empty(3);
        for i in 0..3 {
            s.apply(
                &inst,
                Move::Insert {
                    row: i,
                    col: 0,
                    index: 0,
                },
            )
            .unwrap();
        }
        let repairs: Vec<Move> = s
            .legal_moves(&inst)
            .into_iter()
            .filter(|m| matches!(m, Move::Repair { .. }))
            .collect();
        assert_eq!(repairs.len(), 3 * (3 - 1));
        assert!(s
            .clone()
            .apply(
                &inst,
                Move::Repair {
                    source: 1,
                    target: 0,
                    row: 0
                }
            )
            .is_err());
        s.apply(
            &inst,
            Move::Repair {
                source: 0,
                target: 2,
                row: 1,
            },
        )
        .unwrap();
        assert_eq!(s.get(1, 0), None);
        assert_eq!(s.get(1, 2), Some(0));
        assert!(s
            .apply(
                &inst,
                Move::Insert {
                    row: 1,
                    col: 1,
                    index: 0
                }
            )
            .is_err());
    }

    #[test]
    fn matrix_round_trip() {
        let m = vec![vec![0, -1], vec![-1, 1]];
        let s = AssignmentState::from_matrix(&m).unwrap();
        assert_eq!(s.to_matrix(), m);
        assert!(AssignmentState::from_matrix(&[vec![0, 0], vec![-1, -1]]).is_err());
    }
}
