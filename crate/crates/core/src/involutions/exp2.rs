//! Smallest odd-cycle trade across three conjugate views.
//!
//! Views (rows, columns, symbols) are tried in order, and within each view
//! four pairing strategies of increasing coverage. The first view/strategy
//! with any odd cycle applies the minimum by `(length, pair position, sorted
//! cycle)`. With no odd cycle anywhere, rows 0 and 1 are swapped.

use serde::{Deserialize, Serialize};

use super::{require_even, AppliedMove, Fallback, InvolutionMap, MapOutcome, Stage};
use crate::error::Result;
use crate::latin::{
    apply_trade_unchecked, cycles, matching_permutation, LatinSquare, LineMode, Trade,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum View {
    Row,
    Col,
    Sym,
}

impl View {
    fn mode(self) -> LineMode {
        match self {
            View::Row => LineMode::Row,
            View::Col => LineMode::Column,
            View::Sym => LineMode::Symbol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingStrategy {
    Adjacent,
    HalfShifted,
    OneFactors,
    Exhaustive,
}

impl PairingStrategy {
    pub const ORDER: [PairingStrategy; 4] = [
        PairingStrategy::Adjacent,
        PairingStrategy::HalfShifted,
        PairingStrategy::OneFactors,
        PairingStrategy::Exhaustive,
    ];

    pub fn pairs(self, n: usize) -> Vec<(usize, usize)> {
        match self {
            PairingStrategy::Adjacent => (0..n.saturating_sub(1))
                .step_by(2)
                .map(|i| (i, i + 1))
                .collect(),
            PairingStrategy::HalfShifted if n % 2 == 1 => Vec::new(),
            PairingStrategy::HalfShifted => (0..n / 2).map(|i| (i, i + n / 2)).collect(),
            PairingStrategy::OneFactors => one_factorization(n).concat(),
            PairingStrategy::Exhaustive => (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect(),
        }
    }
}

/// The round-robin 1-factorisation of `K_n` (`n` even): vertex `n - 1` is
/// fixed and the rest rotate around an `(n - 1)`-gon.
pub fn one_factorization(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n < 2 {
        return Vec::new();
    }
    let m = n - 1;
    let sorted = |a: usize, b: usize| (a.min(b), a.max(b));
    (0..m)
        .map(|turn| {
            let mut pairs = vec![sorted(turn, m)];
            for k in 1..n / 2 {
                pairs.push(sorted((turn + m - k) % m, (turn + k) % m));
            }
            pairs
        })
        .collect()
}

#[derive(Debug, Clone, Default)]
pub struct Exp2Map;

/// Cycle length, pair ordinal, sorted support.
type CycleKey = (usize, usize, Vec<usize>);

impl InvolutionMap for Exp2Map {
    fn name(&self) -> &str {
        "e2"
    }

    fn apply(&self, sq: &LatinSquare) -> Result<MapOutcome> {
        require_even(sq)?;
        let n = sq.order();
        for view in [View::Row, View::Col, View::Sym] {
            for strategy in PairingStrategy::ORDER {
                let mut best: Option<(CycleKey, usize, usize, Vec<usize>)> = None;
                for (ordinal, (a, b)) in strategy.pairs(n).into_iter().enumerate() {
                    let perm = matching_permutation(sq, view.mode(), a, b);
                    for cyc in cycles(&perm)
                        .into_iter()
                        .filter(|c| c.len() > 1 && c.len() % 2 == 1)
                    {
                        let mut sorted = cyc.clone();
                        sorted.sort_unstable();
                        let key = (cyc.len(), ordinal, sorted);
                        if best.as_ref().is_none_or(|(k, ..)| key < *k) {
                            best = Some((key, a, b, cyc));
                        }
                    }
                }
                if let Some((_, a, b, support)) = best {
                    let output = apply_trade_unchecked(sq, view.mode(), a, b, &support);
                    let trade = Trade {
                        mode: view.mode(),
                        first: a,
                        second: b,
                        support,
                    };
                    return Ok(MapOutcome {
                        output,
                        applied: AppliedMove::Trade {
                            stage: Stage::View { view, strategy },
                            trade,
                        },
                    });
                }
            }
        }
        Ok(MapOutcome {
            output: sq.swap_rows(0, 1),
            applied: AppliedMove::Fallback {
                fallback: Fallback::SwapRows01,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn one_factorization_partitions_the_edges() {
        for n in [2, 4, 6, 8, 10] {
            let f = one_factorization(n);
            assert_eq!(f.len(), n - 1);
            let mut all = HashSet::new();
            for matching in &f {
                let mut covered: Vec<usize> = matching.iter().flat_map(|&(a, b)| [a, b]).collect();
                covered.sort_unstable();
                assert_eq!(covered, (0..n).collect::<Vec<_>>());
                for &e in matching {
                    assert!(all.insert(e));
                }
            }
            assert_eq!(all.len(), n * (n - 1) / 2);
        }
        assert_eq!(one_factorization(4)[0], vec![(0, 3), (1, 2)]);
    }

    #[test]
    fn no_odd_cycle_falls_back_to_row_swap() {
        // The cyclic square of order 4 has only even matching cycles in every view.
        let sq = LatinSquare::cyclic(4);
        let out = Exp2Map.apply(&sq).unwrap();
        assert_eq!(out.output, sq.swap_rows(0, 1));
        assert!(matches!(out.applied, AppliedMove::Fallback { .. }));
    }
}
