//! Graphs, bipartite incidence matrices, decks and the exact verifiers built on them.

pub mod canon;
pub mod deck;
pub mod invariants;
pub mod types;
pub mod wl;

pub use canon::{bipartite_canonical_form, canonical_form, isomorphic, CanonicalForm};
pub use deck::{exact_deck_equal, make_deck, Card, CardClass, Deck, Deckable};
pub use invariants::{kelly_degrees, kelly_edge_count, kelly_triangle_count, value_counts};
pub use types::{articulation_points, BipartiteIncidence, Graph, Side, MAX_VERTICES};
pub use wl::{wl_signature, WlSignature, DEFAULT_WL_STEPS};
