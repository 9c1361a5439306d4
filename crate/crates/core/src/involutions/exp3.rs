//! Tiered odd-cycle trades with stability checks, conjugated by line swaps.
//!
//! The inner rule `T` tries, in order: the first odd cycle between adjacent
//! rows `(2i, 2i+1)`; the first adjacent-column odd cycle whose result has no
//! adjacent-row odd cycle; and a global search over every row and column
//! pair that keeps only results that are stable (no higher-tier trade) and
//! canonical (no smaller-keyed trade in the result leads to a stable square).
//! When `T` is undefined, the map conjugates by a row swap, then a column
//! swap, accepting only images on which `T` stays undefined. The last resort
//! swaps symbols 0 and 1.

use std::cmp::Ordering;

use super::{require_even, AppliedMove, Fallback, InvolutionMap, MapOutcome, Stage, Transposition};
use crate::error::Result;
use crate::latin::{apply_trade_unchecked, odd_cycles, LatinSquare, LineMode, Trade};

#[derive(Debug, Clone, Default)]
pub struct Exp3Map;

/// Sort key of a global trade: `(length, cycle, first, second, row-before-column)`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct TradeKey {
    cycle: Vec<usize>,
    first: usize,
    second: usize,
    mode: LineMode,
}

impl Ord for TradeKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cycle
            .len()
            .cmp(&other.cycle.len())
            .then_with(|| self.cycle.cmp(&other.cycle))
            .then(self.first.cmp(&other.first))
            .then(self.second.cmp(&other.second))
            .then(self.mode.cmp(&other.mode))
    }
}

impl PartialOrd for TradeKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TradeKey {
    fn apply(&self, sq: &LatinSquare) -> LatinSquare {
        apply_trade_unchecked(sq, self.mode, self.first, self.second, &self.cycle)
    }

    fn trade(&self) -> Trade {
        Trade {
            mode: self.mode,
            first: self.first,
            second: self.second,
            support: self.cycle.clone(),
        }
    }
}

fn adjacent(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n / 2).map(|i| (2 * i, 2 * i + 1))
}

fn has_tier1_trade(sq: &LatinSquare) -> bool {
    adjacent(sq.order()).any(|(a, b)| !odd_cycles(sq, LineMode::Row, a, b).is_empty())
}

fn has_safe_tier2_trade(sq: &LatinSquare) -> bool {
    adjacent(sq.order()).any(|(a, b)| {
        odd_cycles(sq, LineMode::Column, a, b)
            .iter()
            .any(|cyc| !has_tier1_trade(&apply_trade_unchecked(sq, LineMode::Column, a, b, cyc)))
    })
}

fn is_stable(sq: &LatinSquare) -> bool {
    !has_tier1_trade(sq) && !has_safe_tier2_trade(sq)
}

fn all_trades(sq: &LatinSquare) -> Vec<TradeKey> {
    let n = sq.order();
    let mut out = Vec::new();
    for mode in [LineMode::Row, LineMode::Column] {
        for a in 0..n {
            for b in a + 1..n {
                for cycle in odd_cycles(sq, mode, a, b) {
                    out.push(TradeKey {
                        cycle,
                        first: a,
                        second: b,
                        mode,
                    });
                }
            }
        }
    }
    out.sort();
    out
}

/// The inner rule `T`: the output, the trade and its tier, or `None`.
fn tiered_trade(sq: &LatinSquare) -> Option<(LatinSquare, Trade, u8)> {
    let n = sq.order();
    for (a, b) in adjacent(n) {
        if let Some(cyc) = odd_cycles(sq, LineMode::Row, a, b).into_iter().next() {
            let out = apply_trade_unchecked(sq, LineMode::Row, a, b, &cyc);
            return Some((
                out,
                Trade {
                    mode: LineMode::Row,
                    first: a,
                    second: b,
                    support: cyc,
                },
                1,
            ));
        }
    }
    for (a, b) in adjacent(n) {
        for cyc in odd_cycles(sq, LineMode::Column, a, b) {
            let out = apply_trade_unchecked(sq, LineMode::Column, a, b, &cyc);
            if !has_tier1_trade(&out) {
                return Some((
                    out,
                    Trade {
                        mode: LineMode::Column,
                        first: a,
                        second: b,
                        support: cyc,
                    },
                    2,
                ));
            }
        }
    }
    for cand in all_trades(sq) {
        let out = cand.apply(sq);
        if !is_stable(&out) {
            continue;
        }
        let canonical = all_trades(&out)
            .iter()
            .take_while(|t| **t < cand)
            .all(|t| !is_stable(&t.apply(&out)));
        if canonical {
            return Some((out, cand.trade(), 3));
        }
    }
    None
}

impl InvolutionMap for Exp3Map {
    fn name(&self) -> &str {
        "e3"
    }

    fn apply(&self, sq: &LatinSquare) -> Result<MapOutcome> {
        require_even(sq)?;
        let n = sq.order();
        if let Some((output, trade, tier)) = tiered_trade(sq) {
            return Ok(MapOutcome {
                output,
                applied: AppliedMove::Trade {
                    stage: Stage::Tier { tier },
                    trade,
                },
            });
        }
        let swaps = |mode| {
            (0..n).flat_map(move |a| {
                (a + 1..n).map(move |b| Transposition {
                    mode,
                    first: a,
                    second: b,
                })
            })
        };
        for by in swaps(LineMode::Row) {
            if let Some((inner, trade, tier)) = tiered_trade(&by.apply(sq)) {
                let output = by.apply(&inner);
                if tiered_trade(&output).is_none() {
                    return Ok(MapOutcome {
                        output,
                        applied: AppliedMove::Conjugated {
                            by,
                            stage: Stage::Tier { tier },
                            trade,
                        },
                    });
                }
            }
        }
        for by in swaps(LineMode::Column) {
            if let Some((inner, trade, tier)) = tiered_trade(&by.apply(sq)) {
                let output = by.apply(&inner);
                if tiered_trade(&output).is_some() {
                    continue;
                }
                if swaps(LineMode::Row).any(|r| tiered_trade(&r.apply(&output)).is_some()) {
                    continue;
                }
                return Ok(MapOutcome {
                    output,
                    applied: AppliedMove::Conjugated {
                        by,
                        stage: Stage::Tier { tier },
                        trade,
                    },
                });
            }
        }
        Ok(MapOutcome {
            output: sq.swap_symbols(0, 1),
            applied: AppliedMove::Fallback {
                fallback: Fallback::SwapSymbols01,
            },
        })
    }
}
