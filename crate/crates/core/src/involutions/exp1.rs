//! First-found trade over a fixed, seeded sequence of line pairs.
//!
//! The sequence optionally opens with sign-preserving "sabotage" probes on
//! two random row pairs, then lists stride row pairs, random row matchings,
//! stride column pairs and random column matchings. A trade is accepted only
//! if no earlier entry would fire on the result, which makes the rule
//! self-consistent on most inputs. Squares with no acceptable trade fall
//! back to a fixed sign-preserving move.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{require_even, AppliedMove, Fallback, InvolutionMap, MapOutcome, Stage};
use crate::error::Result;
use crate::latin::{
    apply_trade_unchecked, cycles, matching_permutation, LatinSquare, LineMode, Trade,
};
use crate::rng::{self, Purpose};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TradeStrategy {
    /// First odd cycle plus the first even cycle, if any.
    Flip,
    /// First even cycle, subject to a rarity test.
    Sabotage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TradeSequenceEntry {
    pub mode: LineMode,
    pub first: usize,
    pub second: usize,
    pub strategy: TradeStrategy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exp1Config {
    /// Seed of the random matchings.
    pub seed: u64,
    /// Random matchings per line kind.
    pub random_rounds: usize,
    /// Whether orders above 8 open with sabotage probes.
    pub sabotage: bool,
    /// A sabotage cycle `C` is accepted when `sum(x(x+13)) % modulus == 0`.
    pub sabotage_modulus: u64,
}

impl Default for Exp1Config {
    fn default() -> Self {
        Self {
            seed: 42,
            random_rounds: 50,
            sabotage: true,
            sabotage_modulus: 20,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Exp1Map {
    pub config: Exp1Config,
}

impl Exp1Map {
    pub fn new(config: Exp1Config) -> Self {
        Self { config }
    }

    /// The trade sequence for order `n`.
    pub fn sequence(&self, n: usize) -> Vec<TradeSequenceEntry> {
        let half = n / 2;
        let mut rng = rng::stream(self.config.seed, Purpose::TradeSequence, n as u64);
        let mut out = Vec::new();
        let entry = |mode, first, second, strategy| TradeSequenceEntry {
            mode,
            first,
            second,
            strategy,
        };
        if self.config.sabotage && n > 8 {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            out.push(entry(
                LineMode::Row,
                perm[0],
                perm[1],
                TradeStrategy::Sabotage,
            ));
            if half >= 2 {
                out.push(entry(
                    LineMode::Row,
                    perm[2],
                    perm[3],
                    TradeStrategy::Sabotage,
                ));
            }
        }
        for mode in [LineMode::Row, LineMode::Column] {
            for i in 0..half {
                out.push(entry(mode, i, i + half, TradeStrategy::Flip));
            }
            for _ in 0..self.config.random_rounds {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                for k in 0..half {
                    out.push(entry(
                        mode,
                        perm[2 * k],
                        perm[2 * k + 1],
                        TradeStrategy::Flip,
                    ));
                }
            }
        }
        out
    }

    fn find(&self, sq: &LatinSquare, e: &TradeSequenceEntry) -> Option<Vec<usize>> {
        let perm = matching_permutation(sq, e.mode, e.first, e.second);
        let cyc: Vec<Vec<usize>> = cycles(&perm).into_iter().filter(|c| c.len() > 1).collect();
        let first_odd = cyc.iter().find(|c| c.len() % 2 == 1);
        let first_even = cyc.iter().find(|c| c.len() % 2 == 0);
        match e.strategy {
            TradeStrategy::Flip => {
                let mut support = first_odd?.clone();
                if let Some(even) = first_even {
                    support.extend(even);
                }
                Some(support)
            }
            TradeStrategy::Sabotage => {
                let even = first_even?;
                let h: u64 = even.iter().map(|&x| (x * (x + 13)) as u64).sum();
                h.is_multiple_of(self.config.sabotage_modulus)
                    .then(|| even.clone())
            }
        }
    }
}

impl InvolutionMap for Exp1Map {
    fn name(&self) -> &str {
        "e1"
    }

    fn apply(&self, sq: &LatinSquare) -> Result<MapOutcome> {
        require_even(sq)?;
        let n = sq.order();
        let seq = self.sequence(n);
        for (k, e) in seq.iter().enumerate() {
            let Some(support) = self.find(sq, e) else {
                continue;
            };
            let out = apply_trade_unchecked(sq, e.mode, e.first, e.second, &support);
            if seq[..k].iter().all(|p| self.find(&out, p).is_none()) {
                let trade = Trade {
                    mode: e.mode,
                    first: e.first,
                    second: e.second,
                    support,
                };
                return Ok(MapOutcome {
                    output: out,
                    applied: AppliedMove::Trade {
                        stage: Stage::Sequence {
                            index: k,
                            strategy: e.strategy,
                        },
                        trade,
                    },
                });
            }
        }
        if (n / 2) % 2 == 1 {
            Ok(MapOutcome {
                output: sq.swap_symbols(0, 1),
                applied: AppliedMove::Fallback {
                    fallback: Fallback::SwapSymbols01,
                },
            })
        } else {
            Ok(MapOutcome {
                output: sq.row_symbol_conjugate(),
                applied: AppliedMove::Fallback {
                    fallback: Fallback::RowSymbolConjugate,
                },
            })
        }
    }
}
