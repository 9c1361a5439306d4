//! Bit-packed vectors over GF(2) and the rank, duplicate and circuit oracles.
//!
//! Vectors are stored little-endian: bit `i` lives in word `i / 64` at
//! position `i % 64`. The `*_packed` functions work on single-word vectors
//! (length at most 64) and back the hot loops of the rainbow-basis engine.

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::combinatorics::Combinations;
use crate::error::{Error, Result};

/// Circuit searches on sets at most this large are always exhaustive.
pub const FULL_SEARCH_LIMIT: usize = 7;

/// A vector in GF(2)^len.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Vec {
    len: usize,
    words: Vec<u64>,
}

impl Gf2Vec {
    pub fn zero(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// Standard basis vector `e_index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zero(len);
        v.set(index, true);
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zero(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Builds a vector of length `len` from the low bits of `word`.
    pub fn from_word(len: usize, word: u64) -> Self {
        assert!(len <= 64, "from_word needs len <= 64");
        let mut v = Self::zero(len);
        if len > 0 {
            v.words[0] = word & low_mask(len);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The single packed word of a vector of length at most 64.
    pub fn as_word(&self) -> u64 {
        assert!(self.len <= 64, "as_word needs len <= 64");
        self.words.first().copied().unwrap_or(0)
    }

    pub fn xor_assign(&mut self, other: &Gf2Vec) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    fn highest_bit(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    /// Little-endian hex: byte `b` holds bits `8b..8b+8`, low bit first.
    pub fn to_hex(&self) -> String {
        let nbytes = self.len.div_ceil(8);
        (0..nbytes)
            .map(|b| format!("{:02x}", (self.words[b / 8] >> ((b % 8) * 8)) & 0xff))
            .collect()
    }

    pub fn from_hex(len: usize, hex: &str) -> Result<Self> {
        let nbytes = len.div_ceil(8);
        if hex.len() != 2 * nbytes {
            return Err(Error::DimensionMismatch {
                expected: 2 * nbytes,
                found: hex.len(),
            });
        }
        let mut v = Self::zero(len);
        for b in 0..nbytes {
            let byte = u64::from_str_radix(&hex[2 * b..2 * b + 2], 16)
                .map_err(|e| Error::Config(format!("bad hex in vector: {e}")))?;
            v.words[b / 8] |= byte << ((b % 8) * 8);
        }
        if !len.is_multiple_of(64) {
            let last = v.words.len() - 1;
            if v.words[last] & !low_mask(len % 64) != 0 {
                return Err(Error::Config(
                    "hex vector has bits beyond its length".into(),
                ));
            }
        }
        Ok(v)
    }
}

fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

impl fmt::Debug for Gf2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits: String = (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        write!(f, "Gf2Vec({bits})")
    }
}

#[derive(Serialize, Deserialize)]
struct HexForm {
    len: usize,
    hex: String,
}

impl Serialize for Gf2Vec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HexForm {
            len: self.len,
            hex: self.to_hex(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Gf2Vec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let h = HexForm::deserialize(d)?;
        Gf2Vec::from_hex(h.len, &h.hex).map_err(serde::de::Error::custom)
    }
}

/// A minimal dependent subset, as indices into the queried set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub indices: Vec<usize>,
}

impl Circuit {
    pub fn size(&self) -> usize {
        self.indices.len()
    }
}

fn common_len(vectors: &[Gf2Vec]) -> Result<Option<usize>> {
    let Some(first) = vectors.first() else {
        return Ok(None);
    };
    for v in vectors {
        if v.len != first.len {
            return Err(Error::DimensionMismatch {
                expected: first.len,
                found: v.len,
            });
        }
    }
    Ok(Some(first.len))
}

/// Dimension of the span of `vectors`.
pub fn rank(vectors: &[Gf2Vec]) -> Result<usize> {
    let Some(len) = common_len(vectors)? else {
        return Ok(0);
    };
    let mut pivots: Vec<Option<Gf2Vec>> = vec![None; len];
    let mut r = 0;
    for v in vectors {
        let mut x = v.clone();
        while let Some(p) = x.highest_bit() {
            match &pivots[p] {
                Some(b) => x.xor_assign(b),
                None => {
                    pivots[p] = Some(x);
                    r += 1;
                    break;
                }
            }
        }
    }
    Ok(r)
}

/// `|vectors| - rank(vectors)`.
pub fn deficit(vectors: &[Gf2Vec]) -> Result<usize> {
    Ok(vectors.len() - rank(vectors)?)
}

/// Number of members beyond the first copy of each distinct vector.
pub fn dup_count(vectors: &[Gf2Vec]) -> Result<usize> {
    common_len(vectors)?;
    let distinct: HashSet<&Gf2Vec> = vectors.iter().collect();
    Ok(vectors.len() - distinct.len())
}

/// A minimal dependent subset of `vectors`, or `None` when they are independent.
///
/// Sets of at most [`FULL_SEARCH_LIMIT`] vectors, or any set when
/// `max_probe` is `None`, are searched exhaustively: the result has minimum
/// size and is the lexicographically smallest index tuple of that size.
/// Larger sets with `max_probe = Some(p)` only try sizes `2..=p`; when that
/// finds nothing the whole index set is returned.
pub fn find_circuit(vectors: &[Gf2Vec], max_probe: Option<usize>) -> Result<Option<Circuit>> {
    common_len(vectors)?;
    if rank(vectors)? == vectors.len() {
        return Ok(None);
    }
    let xor_is_zero = |idx: &[usize]| {
        let mut acc = vectors[idx[0]].clone();
        for &i in &idx[1..] {
            acc.xor_assign(&vectors[i]);
        }
        acc.is_zero()
    };
    match max_probe {
        Some(p) if vectors.len() > FULL_SEARCH_LIMIT => {
            for k in 2..=p.min(vectors.len()) {
                if let Some(idx) = Combinations::new(vectors.len(), k).find(|c| xor_is_zero(c)) {
                    return Ok(Some(Circuit { indices: idx }));
                }
            }
            Ok(Some(Circuit {
                indices: (0..vectors.len()).collect(),
            }))
        }
        _ => {
            for k in 1..=vectors.len() {
                if let Some(idx) = Combinations::new(vectors.len(), k).find(|c| xor_is_zero(c)) {
                    return Ok(Some(Circuit { indices: idx }));
                }
            }
            unreachable!("a dependent set contains a zero-sum subset")
        }
    }
}

/// Columns of a uniformly random invertible `n x n` matrix.
pub fn random_gl<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Gf2Vec> {
    loop {
        let cols: Vec<Gf2Vec> = (0..n)
            .map(|_| {
                let mut v = Gf2Vec::zero(n);
                for w in v.words.iter_mut() {
                    *w = rng.gen();
                }
                if !n.is_multiple_of(64) {
                    let last = v.words.len() - 1;
                    v.words[last] &= low_mask(n % 64);
                }
                v
            })
            .collect();
        if rank(&cols).expect("equal lengths") == n {
            return cols;
        }
    }
}

/// [`rank`] for vectors packed into single words.
pub fn rank_packed(vectors: &[u64]) -> usize {
    let mut basis = [0u64; 64];
    let mut r = 0;
    for &v in vectors {
        let mut x = v;
        while x != 0 {
            let p = 63 - x.leading_zeros() as usize;
            if basis[p] == 0 {
                basis[p] = x;
                r += 1;
                break;
            }
            x ^= basis[p];
        }
    }
    r
}

/// [`dup_count`] for packed vectors.
pub fn dup_count_packed(vectors: &[u64]) -> usize {
    let mut sorted = vectors.to_vec();
    sorted.sort_unstable();
    sorted.windows(2).filter(|w| w[0] == w[1]).count()
}

/// [`find_circuit`] for packed vectors.
pub fn find_circuit_packed(vectors: &[u64], max_probe: Option<usize>) -> Option<Vec<usize>> {
    let m = vectors.len();
    if rank_packed(vectors) == m {
        return None;
    }
    let (lo, hi, fallback) = match max_probe {
        Some(p) if m > FULL_SEARCH_LIMIT => (2, p.min(m), true),
        _ => (1, m, false),
    };
    for k in lo..=hi {
        if let Some(c) = first_zero_sum(vectors, k) {
            return Some(c);
        }
    }
    assert!(fallback, "a dependent set contains a zero-sum subset");
    Some((0..m).collect())
}

/// Lexicographically first `k`-subset whose XOR is zero.
fn first_zero_sum(vectors: &[u64], k: usize) -> Option<Vec<usize>> {
    fn go(v: &[u64], start: usize, left: usize, acc: u64, chosen: &mut Vec<usize>) -> bool {
        if left == 0 {
            return acc == 0;
        }
        for i in start..=v.len() - left {
            chosen.push(i);
            if go(v, i + 1, left - 1, acc ^ v[i], chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut chosen = Vec::with_capacity(k);
    if k <= vectors.len() && go(vectors, 0, k, 0, &mut chosen) {
        Some(chosen)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(n: usize, i: usize) -> Gf2Vec {
        Gf2Vec::unit(n, i)
    }

    fn sum(a: &Gf2Vec, b: &Gf2Vec) -> Gf2Vec {
        let mut x = a.clone();
        x.xor_assign(b);
        x
    }

    /// Rank from the size of the span, enumerated by brute force.
    fn span_rank(words: &[u64]) -> usize {
        let mut span = HashSet::new();
        for mask in 0u32..1 << words.len() {
            let x = (0..words.len())
                .filter(|&i| mask >> i & 1 == 1)
                .fold(0, |a, i| a ^ words[i]);
            span.insert(x);
        }
        span.len().trailing_zeros() as usize
    }

    /// Minimum zero-sum subset by scanning every bitmask.
    fn brute_circuit(words: &[u64]) -> Option<Vec<usize>> {
        let mut best: Option<Vec<usize>> = None;
        for mask in 1u32..1 << words.len() {
            let idx: Vec<usize> = (0..words.len()).filter(|&i| mask >> i & 1 == 1).collect();
            if idx.iter().fold(0, |a, &i| a ^ words[i]) != 0 {
                continue;
            }
            let better = match &best {
                None => true,
                Some(b) => idx.len() < b.len() || (idx.len() == b.len() && idx < *b),
            };
            if better {
                best = Some(idx);
            }
        }
        best
    }

    #[test]
    fn basics() {
        let n = 5;
        let basis: Vec<_> = (0..n).map(|i| e(n, i)).collect();
        assert_eq!(rank(&basis).unwrap(), 5);
        assert_eq!(find_circuit(&basis, None).unwrap(), None);

        let twice = vec![e(n, 0), e(n, 0)];
        assert_eq!(rank(&twice).unwrap(), 1);
        assert_eq!(dup_count(&twice).unwrap(), 1);
        assert_eq!(
            find_circuit(&twice, None).unwrap().unwrap().indices,
            vec![0, 1]
        );

        let tri = vec![e(n, 0), e(n, 1), sum(&e(n, 0), &e(n, 1))];
        assert_eq!(
            find_circuit(&tri, None).unwrap().unwrap().indices,
            vec![0, 1, 2]
        );

        assert_eq!(rank(&[]).unwrap(), 0);
        assert_eq!(rank(&[Gf2Vec::zero(3)]).unwrap(), 0);
        assert!(matches!(
            rank(&[e(3, 0), e(4, 0)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn probe_mode_falls_back_to_whole_set() {
        // Nine vectors in GF(2)^8 whose only dependency uses all nine.
        let n = 8;
        let mut vs: Vec<_> = (0..n).map(|i| e(n, i)).collect();
        let all = vs.iter().fold(Gf2Vec::zero(n), |a, v| sum(&a, v));
        vs.push(all);
        let c = find_circuit(&vs, Some(4)).unwrap().unwrap();
        assert_eq!(c.indices, (0..9).collect::<Vec<_>>());
        let full = find_circuit(&vs, None).unwrap().unwrap();
        assert_eq!(full.size(), 9);
        let packed: Vec<u64> = vs.iter().map(Gf2Vec::as_word).collect();
        assert_eq!(find_circuit_packed(&packed, Some(4)).unwrap().len(), 9);
    }

    #[test]
    fn hex_round_trip_and_layout() {
        let v = Gf2Vec::from_bits(&[true, false, false, false, true, false, false, false, true]);
        assert_eq!(v.to_hex(), "1101");
        assert_eq!(Gf2Vec::from_hex(9, "1101").unwrap(), v);
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(serde_json::from_str::<Gf2Vec>(&json).unwrap(), v);
        assert!(Gf2Vec::from_hex(9, "11ff").is_err());
    }

    #[test]
    fn random_gl_is_invertible() {
        let mut rng = crate::rng::seeded(3);
        for n in 1..12 {
            assert_eq!(rank(&random_gl(n, &mut rng)).unwrap(), n);
        }
    }

    proptest! {
        #[test]
        fn rank_matches_span_size(words in prop::collection::vec(0u64..64, 0..10)) {
            let vs: Vec<_> = words.iter().map(|&w| Gf2Vec::from_word(6, w)).collect();
            prop_assert_eq!(rank(&vs).unwrap(), span_rank(&words));
            prop_assert_eq!(rank_packed(&words), span_rank(&words));
            prop_assert!(rank(&vs).unwrap() <= vs.len().min(6));
        }

        #[test]
        fn rank_invariant_under_permutation_and_elementary_ops(
            words in prop::collection::vec(0u64..256, 1..9),
            shift in 0usize..9,
            a in 0usize..9,
            b in 0usize..9,
        ) {
            let vs: Vec<_> = words.iter().map(|&w| Gf2Vec::from_word(8, w)).collect();
            let r = rank(&vs).unwrap();
            let mut rotated = vs.clone();
            rotated.rotate_left(shift % vs.len());
            prop_assert_eq!(rank(&rotated).unwrap(), r);
            let (a, b) = (a % vs.len(), b % vs.len());
            if a != b {
                let mut added = vs.clone();
                let src = added[b].clone();
                added[a].xor_assign(&src);
                prop_assert_eq!(rank(&added).unwrap(), r);
            }
        }

        #[test]
        fn circuit_is_minimal_and_matches_brute_force(words in prop::collection::vec(0u64..32, 0..9)) {
            let vs: Vec<_> = words.iter().map(|&w| Gf2Vec::from_word(5, w)).collect();
            let got = find_circuit(&vs, None).unwrap().map(|c| c.indices);
            prop_assert_eq!(&got, &brute_circuit(&words));
            prop_assert_eq!(find_circuit_packed(&words, None), got.clone());
            if let Some(c) = got {
                let sub: Vec<_> = c.iter().map(|&i| vs[i].clone()).collect();
                prop_assert_eq!(deficit(&sub).unwrap(), 1);
                for skip in 0..sub.len() {
                    let mut smaller = sub.clone();
                    smaller.remove(skip);
                    prop_assert_eq!(deficit(&smaller).unwrap(), 0);
                }
            }
        }

        #[test]
        fn dup_count_matches_packed(words in prop::collection::vec(0u64..8, 0..12)) {
            let vs: Vec<_> = words.iter().map(|&w| Gf2Vec::from_word(3, w)).collect();
            prop_assert_eq!(dup_count(&vs).unwrap(), dup_count_packed(&words));
        }
    }
}
