//! Latin squares, their parity, isotopies and cycle trades.

pub mod square;
pub mod trade;

pub use square::{enumerate_latin, Isotopy, LatinSquare, Sign};
pub use trade::{
    apply_trade, apply_trade_unchecked, canonical_cycle, cycles, matching_permutation, odd_cycles,
    random_cycle_trade, random_latin, stabilized_canonical_cycle, LineMode, Trade,
};
