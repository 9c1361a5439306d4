use rand::Rng;
use serde::{Deserialize, Serialize};

use super::square::LatinSquare;
use crate::error::{Error, Result};

/// Which pair of lines a trade exchanges entries between.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineMode {
    Row,
    Column,
    Symbol,
}

/// Exchange of entries between lines `first` and `second` over a closed support.
///
/// For rows the support is a set of columns, for columns a set of rows, and
/// for symbols a set of columns (the two symbols swap cells in each).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Trade {
    pub mode: LineMode,
    pub first: usize,
    pub second: usize,
    pub support: Vec<usize>,
}

/// Permutation matching line `first` to line `second`.
///
/// Row mode: column `c` maps to the column of row `second` holding
/// `L[first][c]`. Column mode is the same on the transpose. Symbol mode
/// works on the symbol view (row of symbol `s` in column `c`).
pub fn matching_permutation(
    sq: &LatinSquare,
    mode: LineMode,
    first: usize,
    second: usize,
) -> Vec<usize> {
    let n = sq.order();
    let mut perm = vec![0; n];
    match mode {
        LineMode::Row => {
            let mut pos = vec![0; n];
            for c in 0..n {
                pos[sq.get(second, c)] = c;
            }
            for c in 0..n {
                perm[c] = pos[sq.get(first, c)];
            }
        }
        LineMode::Column => {
            let mut pos = vec![0; n];
            for r in 0..n {
                pos[sq.get(r, second)] = r;
            }
            for r in 0..n {
                perm[r] = pos[sq.get(r, first)];
            }
        }
        LineMode::Symbol => {
            let mut row_of = vec![0; n];
            let mut col_of_second = vec![0; n];
            for c in 0..n {
                for r in 0..n {
                    if sq.get(r, c) == first {
                        row_of[c] = r;
                    }
                    if sq.get(r, c) == second {
                        col_of_second[r] = c;
                    }
                }
            }
            for c in 0..n {
                perm[c] = col_of_second[row_of[c]];
            }
        }
    }
    perm
}

/// Cycles of `perm`, each starting at its least element, ordered by that element.
pub fn cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cyc.push(x);
            x = perm[x];
        }
        out.push(cyc);
    }
    out
}

/// Rotation of `cycle` starting at its least element.
pub fn canonical_cycle(cycle: &[usize]) -> Vec<usize> {
    let Some(k) = (0..cycle.len()).min_by_key(|&i| cycle[i]) else {
        return Vec::new();
    };
    cycle[k..].iter().chain(&cycle[..k]).copied().collect()
}

/// Orientation-free canonical form: the lesser of the canonical cycle and its reversal.
pub fn stabilized_canonical_cycle(cycle: &[usize]) -> Vec<usize> {
    let c1 = canonical_cycle(cycle);
    if c1.len() <= 2 {
        return c1;
    }
    let reversed: Vec<usize> = std::iter::once(c1[0])
        .chain(c1[1..].iter().rev().copied())
        .collect();
    let c2 = canonical_cycle(&reversed);
    c1.min(c2)
}

/// Odd cycles (length at least 3) of the matching permutation, stabilised and
/// sorted by `(length, cycle)`.
pub fn odd_cycles(
    sq: &LatinSquare,
    mode: LineMode,
    first: usize,
    second: usize,
) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = cycles(&matching_permutation(sq, mode, first, second))
        .into_iter()
        .filter(|c| c.len() > 1 && c.len() % 2 == 1)
        .map(|c| stabilized_canonical_cycle(&c))
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Applies `trade`, checking that its support is closed under the matching permutation.
pub fn apply_trade(sq: &LatinSquare, trade: &Trade) -> Result<LatinSquare> {
    let n = sq.order();
    if trade.first >= n || trade.second >= n || trade.first == trade.second {
        return Err(Error::InvalidTrade(format!(
            "lines {} and {} for order {n}",
            trade.first, trade.second
        )));
    }
    let mut in_support = vec![false; n];
    for &x in &trade.support {
        if x >= n || in_support[x] {
            return Err(Error::InvalidTrade(format!("bad support element {x}")));
        }
        in_support[x] = true;
    }
    let perm = matching_permutation(sq, trade.mode, trade.first, trade.second);
    if trade.support.iter().any(|&x| !in_support[perm[x]]) {
        return Err(Error::InvalidTrade(
            "support is not a union of matching cycles".into(),
        ));
    }
    Ok(apply_trade_unchecked(
        sq,
        trade.mode,
        trade.first,
        trade.second,
        &trade.support,
    ))
}

/// Applies a trade whose support is already known to be closed.
pub fn apply_trade_unchecked(
    sq: &LatinSquare,
    mode: LineMode,
    first: usize,
    second: usize,
    support: &[usize],
) -> LatinSquare {
    let mut out = sq.clone();
    match mode {
        LineMode::Row => {
            for &c in support {
                out.set(first, c, sq.get(second, c));
                out.set(second, c, sq.get(first, c));
            }
        }
        LineMode::Column => {
            for &r in support {
                out.set(r, first, sq.get(r, second));
                out.set(r, second, sq.get(r, first));
            }
        }
        LineMode::Symbol => {
            let n = sq.order();
            for &c in support {
                let r1 = (0..n)
                    .find(|&r| sq.get(r, c) == first)
                    .expect("symbol present in column");
                let r2 = (0..n)
                    .find(|&r| sq.get(r, c) == second)
                    .expect("symbol present in column");
                out.set(r1, c, second);
                out.set(r2, c, first);
            }
        }
    }
    out
}

/// A uniformly chosen cycle trade between two random lines of a random mode.
pub fn random_cycle_trade<R: Rng + ?Sized>(
    sq: &LatinSquare,
    rng: &mut R,
    modes: &[LineMode],
) -> Trade {
    let n = sq.order();
    let mode = modes[rng.gen_range(0..modes.len())];
    let first = rng.gen_range(0..n);
    let mut second = rng.gen_range(0..n - 1);
    if second >= first {
        second += 1;
    }
    let cyc = cycles(&matching_permutation(sq, mode, first, second));
    let support = cyc[rng.gen_range(0..cyc.len())].clone();
    Trade {
        mode,
        first,
        second,
        support,
    }
}

/// Random square: the cyclic square mixed by `50n` cycle trades, then a random isotopy.
pub fn random_latin<R: Rng + ?Sized>(n: usize, rng: &mut R) -> LatinSquare {
    let mut sq = LatinSquare::cyclic(n);
    if n >= 2 {
        let modes = [LineMode::Row, LineMode::Column, LineMode::Symbol];
        for _ in 0..50 * n {
            let t = random_cycle_trade(&sq, rng, &modes);
            sq = apply_trade_unchecked(&sq, t.mode, t.first, t.second, &t.support);
        }
    }
    super::square::Isotopy::random(n, rng).apply(&sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cycle_canonical_forms() {
        assert_eq!(canonical_cycle(&[5, 3, 2]), vec![2, 5, 3]);
        assert_eq!(stabilized_canonical_cycle(&[2, 5, 3]), vec![2, 3, 5]);
        assert_eq!(stabilized_canonical_cycle(&[2, 3, 5]), vec![2, 3, 5]);
        assert_eq!(stabilized_canonical_cycle(&[4, 1]), vec![1, 4]);
    }

    #[test]
    fn cyclic_square_matching() {
        let sq = LatinSquare::cyclic(4);
        assert_eq!(
            matching_permutation(&sq, LineMode::Row, 0, 1),
            vec![3, 0, 1, 2]
        );
        assert_eq!(cycles(&[3, 0, 1, 2]), vec![vec![0, 3, 2, 1]]);
        assert!(odd_cycles(&sq, LineMode::Row, 0, 2).is_empty());
    }

    #[test]
    fn open_support_is_rejected() {
        let sq = LatinSquare::cyclic(4);
        let t = Trade {
            mode: LineMode::Row,
            first: 0,
            second: 2,
            support: vec![0],
        };
        assert!(matches!(apply_trade(&sq, &t), Err(Error::InvalidTrade(_))));
    }

    fn sign_law_holds(
        n: usize,
        seed: u64,
        mode: LineMode,
    ) -> std::result::Result<(), TestCaseError> {
        let mut rng = crate::rng::seeded(seed);
        let sq = random_latin(n, &mut rng);
        let t = random_cycle_trade(&sq, &mut rng, &[mode]);
        let out = apply_trade(&sq, &t).unwrap();
        prop_assert!(out.is_latin());
        prop_assert_eq!(apply_trade(&out, &t).unwrap(), sq.clone());
        let flipped = out.sign() != sq.sign();
        match mode {
            LineMode::Symbol => prop_assert!(!flipped),
            _ => prop_assert_eq!(flipped, t.support.len() % 2 == 1),
        }
        Ok(())
    }

    proptest! {
        #[test]
        fn row_and_column_trades_flip_sign_iff_odd(half in 2usize..5, seed in any::<u64>(), col in any::<bool>()) {
            sign_law_holds(2 * half, seed, if col { LineMode::Column } else { LineMode::Row })?;
        }

        #[test]
        fn symbol_trades_preserve_sign(half in 2usize..5, seed in any::<u64>()) {
            sign_law_holds(2 * half, seed, LineMode::Symbol)?;
        }
    }
}
