//! Deterministic maps on even-order Latin squares that try to reverse the sign.
//!
//! Each map returns the image together with a descriptor of the move it made,
//! so harnesses can audit which rule fired.

pub mod exp1;
pub mod exp2;
pub mod exp3;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::latin::{LatinSquare, LineMode, Trade};

pub use exp1::{Exp1Config, Exp1Map, TradeSequenceEntry, TradeStrategy};
pub use exp2::{one_factorization, Exp2Map, PairingStrategy, View};
pub use exp3::Exp3Map;

/// Where in a map's search order a trade was found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum Stage {
    /// Position in a fixed trade sequence.
    Sequence {
        index: usize,
        strategy: TradeStrategy,
    },
    /// A conjugate view and pairing strategy.
    View {
        view: View,
        strategy: PairingStrategy,
    },
    /// A priority tier (1 adjacent rows, 2 adjacent columns, 3 global).
    Tier { tier: u8 },
}

/// A line transposition used to conjugate a square before searching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transposition {
    pub mode: LineMode,
    pub first: usize,
    pub second: usize,
}

impl Transposition {
    pub fn apply(&self, sq: &LatinSquare) -> LatinSquare {
        match self.mode {
            LineMode::Row => sq.swap_rows(self.first, self.second),
            LineMode::Column => sq.swap_columns(self.first, self.second),
            LineMode::Symbol => sq.swap_symbols(self.first, self.second),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fallback {
    SwapSymbols01,
    SwapRows01,
    RowSymbolConjugate,
}

/// What a map did to its input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AppliedMove {
    Trade {
        stage: Stage,
        trade: Trade,
    },
    Conjugated {
        by: Transposition,
        stage: Stage,
        trade: Trade,
    },
    Fallback {
        fallback: Fallback,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapOutcome {
    pub output: LatinSquare,
    pub applied: AppliedMove,
}

/// A deterministic map on Latin squares of even order.
pub trait InvolutionMap: Sync {
    fn name(&self) -> &str;
    fn apply(&self, sq: &LatinSquare) -> Result<MapOutcome>;
}

fn require_even(sq: &LatinSquare) -> Result<()> {
    let n = sq.order();
    if n % 2 == 1 {
        return Err(Error::OddOrder(n));
    }
    if n < 2 {
        return Err(Error::TooSmall {
            what: "order",
            min: 2,
            got: n,
        });
    }
    Ok(())
}

/// Sorted copy of a trade's support, for comparing moves.
pub fn normalized(trade: &Trade) -> Trade {
    let mut t = trade.clone();
    t.support.sort_unstable();
    t
}
