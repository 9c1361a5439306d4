use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{self, Gf2Vec};
use crate::rng::{stream, Purpose};

/// Largest rank handled; vectors are packed into one machine word.
pub const MAX_RANK: usize = 64;

const SAMPLE_ATTEMPTS: usize = 20_000;

/// How the pool's underlying basis was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolMode {
    /// Standard basis `e_1..e_n`.
    Fixed,
    /// Columns of a random invertible matrix.
    Randomized,
}

/// Generic rows, or rows forced through a shared dependent set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    Generic,
    Trap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub kind: InstanceKind,
    pub pool: PoolMode,
}

/// `n` row bases of GF(2)^n. Element `(i, k)` is the `k`-th vector of row `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr", into = "InstanceRepr")]
pub struct Instance {
    rank: usize,
    rows: Vec<Vec<u64>>,
    provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceRepr {
    rank: usize,
    bases: Vec<Vec<String>>,
    provenance: Provenance,
}

impl Instance {
    pub fn new(bases: Vec<Vec<Gf2Vec>>, provenance: Provenance) -> Result<Self> {
        let rank = bases.len();
        if rank < 2 {
            return Err(Error::TooSmall {
                what: "rank",
                min: 2,
                got: rank,
            });
        }
        if rank > MAX_RANK {
            return Err(Error::TooLarge {
                what: "rank",
                max: MAX_RANK,
                got: rank,
            });
        }
        let mut rows = Vec::with_capacity(rank);
        for (i, basis) in bases.iter().enumerate() {
            if basis.len() != rank {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    found: basis.len(),
                });
            }
            if let Some(v) = basis.iter().find(|v| v.len() != rank) {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    found: v.len(),
                });
            }
            let packed: Vec<u64> = basis.iter().map(Gf2Vec::as_word).collect();
            if gf2::rank_packed(&packed) != rank {
                return Err(Error::Generation(format!("row {i} is not a basis")));
            }
            rows.push(packed);
        }
        Ok(Self {
            rank,
            rows,
            provenance,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Packed value of element `(row, index)`.
    pub fn element(&self, row: usize, index: usize) -> u64 {
        self.rows[row][index]
    }

    pub fn basis(&self, row: usize) -> Vec<Gf2Vec> {
        self.rows[row]
            .iter()
            .map(|&w| Gf2Vec::from_word(self.rank, w))
            .collect()
    }
}

impl TryFrom<InstanceRepr> for Instance {
    type Error = Error;

    fn try_from(r: InstanceRepr) -> Result<Self> {
        let bases = r
            .bases
            .iter()
            .map(|row| {
                row.iter()
                    .map(|h| Gf2Vec::from_hex(r.rank, h))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if bases.len() != r.rank {
            return Err(Error::DimensionMismatch {
                expected: r.rank,
                found: bases.len(),
            });
        }
        Instance::new(bases, r.provenance)
    }
}

impl From<Instance> for InstanceRepr {
    fn from(inst: Instance) -> Self {
        let bases = (0..inst.rank)
            .map(|i| inst.basis(i).iter().map(Gf2Vec::to_hex).collect())
            .collect();
        Self {
            rank: inst.rank,
            bases,
            provenance: inst.provenance,
        }
    }
}

/// Pool size used by the fixed-rank benches at rank 5.
pub const RANK5_POOL_SIZE: usize = 12;

/// `ceil(2.2 n)`, the variable-rank pool size.
pub fn variable_rank_pool_size(n: usize) -> usize {
    (22 * n).div_ceil(10)
}

/// Circuit-rich pool: `b_i`, then `b_i + b_{i+1}`, then `b_i + b_{i+2}`,
/// deduplicated, cut to `size` and padded with fresh nonzero vectors.
pub fn gen_pool(n: usize, size: usize, mode: PoolMode, seed: u64) -> Result<Vec<Gf2Vec>> {
    if n < 2 {
        return Err(Error::TooSmall {
            what: "rank",
            min: 2,
            got: n,
        });
    }
    if n > MAX_RANK {
        return Err(Error::TooLarge {
            what: "rank",
            max: MAX_RANK,
            got: n,
        });
    }
    let nonzero = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    if size as u64 > nonzero {
        return Err(Error::TooLarge {
            what: "pool size",
            max: nonzero as usize,
            got: size,
        });
    }
    let mut rng = stream(seed, Purpose::Pool, 0);
    let basis: Vec<u64> = match mode {
        PoolMode::Fixed => (0..n).map(|i| 1u64 << i).collect(),
        PoolMode::Randomized => gf2::random_gl(n, &mut rng)
            .iter()
            .map(Gf2Vec::as_word)
            .collect(),
    };
    let template = basis
        .iter()
        .copied()
        .chain((0..n - 1).map(|i| basis[i] ^ basis[i + 1]))
        .chain((0..n.saturating_sub(2)).map(|i| basis[i] ^ basis[i + 2]));
    let mut pool: Vec<u64> = Vec::with_capacity(size);
    for v in template {
        if pool.len() == size {
            break;
        }
        if !pool.contains(&v) {
            pool.push(v);
        }
    }
    while pool.len() < size {
        let v = rng.gen::<u64>() & nonzero;
        if v != 0 && !pool.contains(&v) {
            pool.push(v);
        }
    }
    Ok(pool.into_iter().map(|w| Gf2Vec::from_word(n, w)).collect())
}

/// Samples `n` row bases from `pool`.
///
/// Generic rows are uniform independent `n`-subsets. Trap rows each contain
/// one forced member of a dependent `n`-subset `D` of the pool (row `i`
/// gets `D[i]`).
pub fn gen_instance(
    pool: &[Gf2Vec],
    n: usize,
    kind: InstanceKind,
    mode: PoolMode,
    seed: u64,
) -> Result<Instance> {
    if n < 2 {
        return Err(Error::TooSmall {
            what: "rank",
            min: 2,
            got: n,
        });
    }
    if pool.len() < n {
        return Err(Error::TooSmall {
            what: "pool size",
            min: n,
            got: pool.len(),
        });
    }
    if let Some(v) = pool.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    let words: Vec<u64> = pool.iter().map(Gf2Vec::as_word).collect();
    if gf2::rank_packed(&words) < n {
        return Err(Error::Generation("pool does not span the space".into()));
    }
    let mut rng = stream(seed, Purpose::Instance, 0);
    let indices: Vec<usize> = (0..words.len()).collect();
    let rows: Vec<Vec<u64>> = match kind {
        InstanceKind::Generic => (0..n)
            .map(|_| sample_basis(&words, &indices, None, n, &mut rng))
            .collect::<Result<_>>()?,
        InstanceKind::Trap => {
            let forced = sample_dependent(&words, n, &mut rng)?;
            forced
                .iter()
                .map(|&f| {
                    let others: Vec<usize> = indices.iter().copied().filter(|&x| x != f).collect();
                    sample_basis(&words, &others, Some(f), n, &mut rng)
                })
                .collect::<Result<_>>()?
        }
    };
    let bases = rows
        .iter()
        .map(|r| r.iter().map(|&w| Gf2Vec::from_word(n, w)).collect())
        .collect();
    Instance::new(
        bases,
        Provenance {
            seed,
            kind,
            pool: mode,
        },
    )
}

fn sample_basis<R: Rng>(
    words: &[u64],
    candidates: &[usize],
    forced: Option<usize>,
    n: usize,
    rng: &mut R,
) -> Result<Vec<u64>> {
    let free = n - usize::from(forced.is_some());
    for _ in 0..SAMPLE_ATTEMPTS {
        let mut row: Vec<u64> = candidates
            .choose_multiple(rng, free)
            .map(|&i| words[i])
            .collect();
        if let Some(f) = forced {
            row.push(words[f]);
        }
        if gf2::rank_packed(&row) == n {
            row.shuffle(rng);
            return Ok(row);
        }
    }
    Err(Error::Generation(format!(
        "no independent {n}-subset found in {SAMPLE_ATTEMPTS} draws"
    )))
}

fn sample_dependent<R: Rng>(words: &[u64], n: usize, rng: &mut R) -> Result<Vec<usize>> {
    let indices: Vec<usize> = (0..words.len()).collect();
    for _ in 0..SAMPLE_ATTEMPTS {
        let set: Vec<usize> = indices.choose_multiple(rng, n).copied().collect();
        let vecs: Vec<u64> = set.iter().map(|&i| words[i]).collect();
        if gf2::rank_packed(&vecs) < n {
            return Ok(set);
        }
    }
    Err(Error::Generation(format!(
        "no dependent {n}-subset found in {SAMPLE_ATTEMPTS} draws"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_rank5_pool() {
        let pool = gen_pool(5, RANK5_POOL_SIZE, PoolMode::Fixed, 0).unwrap();
        let words: Vec<u64> = pool.iter().map(Gf2Vec::as_word).collect();
        let e = |i: usize| 1u64 << i;
        let mut expected: Vec<u64> = (0..5).map(e).collect();
        expected.extend((0..4).map(|i| e(i) ^ e(i + 1)));
        expected.extend((0..3).map(|i| e(i) ^ e(i + 2)));
        assert_eq!(words, expected);
    }

    #[test]
    fn pool_sizes() {
        assert_eq!(variable_rank_pool_size(5), 11);
        assert_eq!(variable_rank_pool_size(13), 29);
        let small = gen_pool(3, 7, PoolMode::Randomized, 4).unwrap();
        let mut words: Vec<u64> = small.iter().map(Gf2Vec::as_word).collect();
        words.sort_unstable();
        assert_eq!(words, (1..8).collect::<Vec<u64>>());
        assert!(gen_pool(3, 8, PoolMode::Fixed, 0).is_err());
    }

    #[test]
    fn instances_meet_their_contract() {
        for seed in 0..20 {
            for kind in [InstanceKind::Generic, InstanceKind::Trap] {
                let pool = gen_pool(7, 16, PoolMode::Randomized, seed).unwrap();
                let inst = gen_instance(&pool, 7, kind, PoolMode::Randomized, seed).unwrap();
                for i in 0..7 {
                    assert_eq!(gf2::rank(&inst.basis(i)).unwrap(), 7);
                    assert!(inst.basis(i).iter().all(|v| pool.contains(v)));
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let pool = gen_pool(5, 12, PoolMode::Fixed, 1).unwrap();
        let inst = gen_instance(&pool, 5, InstanceKind::Trap, PoolMode::Fixed, 1).unwrap();
        let text = serde_json::to_string(&inst).unwrap();
        assert!(text.contains("\"bases\""));
        assert_eq!(serde_json::from_str::<Instance>(&text).unwrap(), inst);
    }
}
