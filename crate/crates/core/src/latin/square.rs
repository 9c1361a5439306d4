use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::combinatorics::{invert, permutation_is_odd};
use crate::error::{Error, Result};

/// Parity of a Latin square: the product of all row and column permutation signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Even,
    Odd,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Even => 1,
            Sign::Odd => -1,
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Even => Sign::Odd,
            Sign::Odd => Sign::Even,
        }
    }
}

/// An `n x n` array over symbols `0..n` with every symbol once per row and column.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatinSquare {
    n: usize,
    cells: Vec<usize>,
}

impl LatinSquare {
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        let sq = Self::from_rows_unchecked(rows)?;
        sq.validate()?;
        Ok(sq)
    }

    /// Builds the array without the Latin check (shape is still checked).
    pub fn from_rows_unchecked(rows: &[Vec<usize>]) -> Result<Self> {
        let n = rows.len();
        let mut cells = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
            cells.extend_from_slice(r);
        }
        Ok(Self { n, cells })
    }

    /// `L[r][c] = (r + c) mod n`.
    pub fn cyclic(n: usize) -> Self {
        Self {
            n,
            cells: (0..n * n).map(|i| (i / n + i % n) % n).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> usize {
        self.cells[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, s: usize) {
        self.cells[r * self.n + c] = s;
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.cells[r * self.n..(r + 1) * self.n]
    }

    pub fn column(&self, c: usize) -> Vec<usize> {
        (0..self.n).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            let mut row_seen = vec![false; n];
            let mut col_seen = vec![false; n];
            for j in 0..n {
                for (s, seen, what) in [
                    (self.get(i, j), &mut row_seen, "row"),
                    (self.get(j, i), &mut col_seen, "column"),
                ] {
                    if s >= n {
                        return Err(Error::InvalidLatin(format!("symbol {s} out of range")));
                    }
                    if seen[s] {
                        return Err(Error::InvalidLatin(format!(
                            "symbol {s} repeated in {what} {i}"
                        )));
                    }
                    seen[s] = true;
                }
            }
        }
        Ok(())
    }

    pub fn is_latin(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn sign(&self) -> Sign {
        let n = self.n;
        let mut odd = false;
        for r in 0..n {
            odd ^= permutation_is_odd(self.row(r));
        }
        for c in 0..n {
            odd ^= permutation_is_odd(&self.column(c));
        }
        if odd {
            Sign::Odd
        } else {
            Sign::Even
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        Self {
            n,
            cells: (0..n * n).map(|i| self.get(i % n, i / n)).collect(),
        }
    }

    /// Symbol view: entry `(s, c)` is the row holding symbol `s` in column `c`.
    pub fn symbol_conjugate(&self) -> Self {
        let n = self.n;
        let mut out = Self {
            n,
            cells: vec![0; n * n],
        };
        for r in 0..n {
            for c in 0..n {
                out.set(self.get(r, c), c, r);
            }
        }
        out
    }

    /// Row-symbol conjugate: entry `(r, L[r][c])` is `c`.
    pub fn row_symbol_conjugate(&self) -> Self {
        let n = self.n;
        let mut out = Self {
            n,
            cells: vec![0; n * n],
        };
        for r in 0..n {
            for c in 0..n {
                out.set(r, self.get(r, c), c);
            }
        }
        out
    }

    pub fn swap_rows(&self, a: usize, b: usize) -> Self {
        let mut out = self.clone();
        for c in 0..self.n {
            out.set(a, c, self.get(b, c));
            out.set(b, c, self.get(a, c));
        }
        out
    }

    pub fn swap_columns(&self, a: usize, b: usize) -> Self {
        let mut out = self.clone();
        for r in 0..self.n {
            out.set(r, a, self.get(r, b));
            out.set(r, b, self.get(r, a));
        }
        out
    }

    pub fn swap_symbols(&self, a: usize, b: usize) -> Self {
        let mut out = self.clone();
        for s in out.cells.iter_mut() {
            if *s == a {
                *s = b;
            } else if *s == b {
                *s = a;
            }
        }
        out
    }

    /// Number of cells where the two squares differ.
    pub fn hamming(&self, other: &Self) -> usize {
        self.cells
            .iter()
            .zip(&other.cells)
            .filter(|(a, b)| a != b)
            .count()
    }
}

impl fmt::Debug for LatinSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LatinSquare{:?}", self.to_rows())
    }
}

impl Serialize for LatinSquare {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatinSquare {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<usize>>::deserialize(d)?;
        LatinSquare::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Independent relabelling of rows, columns and symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Isotopy {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub symbols: Vec<usize>,
}

impl Isotopy {
    pub fn identity(n: usize) -> Self {
        Self {
            rows: (0..n).collect(),
            cols: (0..n).collect(),
            symbols: (0..n).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut iso = Self::identity(n);
        iso.rows.shuffle(rng);
        iso.cols.shuffle(rng);
        iso.symbols.shuffle(rng);
        iso
    }

    /// `out[rows[r]][cols[c]] = symbols[L[r][c]]`.
    pub fn apply(&self, sq: &LatinSquare) -> LatinSquare {
        let n = sq.order();
        let mut out = LatinSquare {
            n,
            cells: vec![0; n * n],
        };
        for r in 0..n {
            for c in 0..n {
                out.set(self.rows[r], self.cols[c], self.symbols[sq.get(r, c)]);
            }
        }
        out
    }

    pub fn inverse(&self) -> Self {
        Self {
            rows: invert(&self.rows),
            cols: invert(&self.cols),
            symbols: invert(&self.symbols),
        }
    }
}

/// Every Latin square of order `n`, in lexicographic order of their rows.
pub fn enumerate_latin(n: usize) -> Result<Vec<LatinSquare>> {
    if n > 5 {
        return Err(Error::TooLarge {
            what: "enumeration order",
            max: 5,
            got: n,
        });
    }
    fn fill(sq: &mut LatinSquare, pos: usize, out: &mut Vec<LatinSquare>) {
        let n = sq.n;
        if pos == n * n {
            out.push(sq.clone());
            return;
        }
        let (r, c) = (pos / n, pos % n);
        for s in 0..n {
            if (0..c).any(|j| sq.get(r, j) == s) || (0..r).any(|i| sq.get(i, c) == s) {
                continue;
            }
            sq.set(r, c, s);
            fill(sq, pos + 1, out);
        }
    }
    let mut out = Vec::new();
    let mut sq = LatinSquare {
        n,
        cells: vec![0; n * n],
    };
    fill(&mut sq, 0, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn counts_and_validation() {
        assert_eq!(enumerate_latin(1).unwrap().len(), 1);
        assert_eq!(enumerate_latin(2).unwrap().len(), 2);
        assert_eq!(enumerate_latin(3).unwrap().len(), 12);
        assert_eq!(enumerate_latin(4).unwrap().len(), 576);
        assert!(LatinSquare::from_rows(&[vec![0, 1], vec![0, 1]]).is_err());
        assert!(LatinSquare::from_rows(&[vec![0, 2], vec![1, 0]]).is_err());
    }

    #[test]
    fn conjugates_are_latin_and_involutive() {
        let sq = Isotopy::random(6, &mut crate::rng::seeded(5)).apply(&LatinSquare::cyclic(6));
        assert!(sq.symbol_conjugate().is_latin());
        assert!(sq.row_symbol_conjugate().is_latin());
        assert_eq!(sq.row_symbol_conjugate().row_symbol_conjugate(), sq);
        assert_eq!(sq.symbol_conjugate().symbol_conjugate(), sq);
        assert_eq!(sq.transpose().transpose(), sq);
    }

    proptest! {
        #[test]
        fn isotopy_preserves_sign_at_even_order(half in 1usize..6, seed in any::<u64>()) {
            let n = 2 * half;
            let mut rng = crate::rng::seeded(seed);
            let sq = crate::latin::random_latin(n, &mut rng);
            let iso = Isotopy::random(n, &mut rng);
            let img = iso.apply(&sq);
            prop_assert!(img.is_latin());
            prop_assert_eq!(img.sign(), sq.sign());
            prop_assert_eq!(iso.inverse().apply(&img), sq);
        }

        #[test]
        fn swaps_flip_sign_at_even_order(half in 1usize..6, a in 0usize..12, b in 0usize..12, seed in any::<u64>()) {
            let n = 2 * half;
            let (a, b) = (a % n, b % n);
            prop_assume!(a != b);
            let sq = crate::latin::random_latin(n, &mut crate::rng::seeded(seed));
            // A row swap flips n column signs (even) and no row sign.
            prop_assert_eq!(sq.swap_rows(a, b).sign(), sq.sign());
            prop_assert_eq!(sq.swap_symbols(a, b).sign(), sq.sign());
        }
    }
}
