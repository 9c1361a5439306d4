use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::canon::{bipartite_canonical_form, canonical_form, CanonicalForm};
use super::types::{BipartiteIncidence, Graph, Side};

/// One deleted-vertex subgraph. The kind records which vertex class was removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Card {
    Vertex { graph: Graph },
    Row { matrix: BipartiteIncidence },
    Column { matrix: BipartiteIncidence },
}

/// Isomorphism class of a card, comparable across labellings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CardClass {
    kind: u8,
    form: CanonicalForm,
}

impl Card {
    pub fn edge_count(&self) -> usize {
        match self {
            Card::Vertex { graph } => graph.edge_count(),
            Card::Row { matrix } | Card::Column { matrix } => matrix.edge_count(),
        }
    }

    /// Side of the deleted vertex for bipartite cards.
    pub fn deleted_side(&self) -> Option<Side> {
        match self {
            Card::Vertex { .. } => None,
            Card::Row { .. } => Some(Side::Row),
            Card::Column { .. } => Some(Side::Column),
        }
    }

    pub fn class(&self) -> CardClass {
        match self {
            Card::Vertex { graph } => CardClass {
                kind: 0,
                form: canonical_form(graph),
            },
            Card::Row { matrix } => CardClass {
                kind: 1,
                form: bipartite_canonical_form(matrix),
            },
            Card::Column { matrix } => CardClass {
                kind: 2,
                form: bipartite_canonical_form(matrix),
            },
        }
    }

    pub fn scrambled<R: Rng + ?Sized>(&self, rng: &mut R) -> Card {
        match self {
            Card::Vertex { graph } => Card::Vertex {
                graph: graph.scrambled(rng),
            },
            Card::Row { matrix } => Card::Row {
                matrix: matrix.scrambled(rng),
            },
            Card::Column { matrix } => Card::Column {
                matrix: matrix.scrambled(rng),
            },
        }
    }
}

/// The multiset of cards of a graph, in a fixed but meaningless order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deck {
    pub cards: Vec<Card>,
}

impl Deck {
    pub fn len(&self) -> usize {
        self.cards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cards.is_empty()
    }

    /// Every card independently relabelled, and the card order shuffled.
    pub fn scrambled<R: Rng + ?Sized>(&self, rng: &mut R) -> Deck {
        let mut cards: Vec<Card> = self.cards.iter().map(|c| c.scrambled(rng)).collect();
        cards.shuffle(rng);
        Deck { cards }
    }

    /// Multiplicity of each card class.
    pub fn class_counts(&self) -> HashMap<CardClass, usize> {
        let mut counts = HashMap::new();
        for c in &self.cards {
            *counts.entry(c.class()).or_insert(0) += 1;
        }
        counts
    }
}

/// Objects that have a deck.
pub trait Deckable {
    fn deck(&self) -> Deck;
    fn edge_count(&self) -> usize;
    /// Degree multisets per vertex class (one bucket for graphs, rows then columns for bipartite graphs).
    fn degree_buckets(&self) -> Vec<Vec<usize>>;
}

impl Deckable for Graph {
    fn deck(&self) -> Deck {
        Deck {
            cards: (0..self.vertex_count())
                .map(|v| Card::Vertex {
                    graph: self.delete_vertex(v),
                })
                .collect(),
        }
    }

    fn edge_count(&self) -> usize {
        Graph::edge_count(self)
    }

    fn degree_buckets(&self) -> Vec<Vec<usize>> {
        vec![self.degrees()]
    }
}

impl Deckable for BipartiteIncidence {
    fn deck(&self) -> Deck {
        let rows = (0..self.rows()).map(|r| Card::Row {
            matrix: self.delete_row(r),
        });
        let cols = (0..self.cols()).map(|c| Card::Column {
            matrix: self.delete_col(c),
        });
        Deck {
            cards: rows.chain(cols).collect(),
        }
    }

    fn edge_count(&self) -> usize {
        BipartiteIncidence::edge_count(self)
    }

    fn degree_buckets(&self) -> Vec<Vec<usize>> {
        vec![self.row_sums(), self.col_sums()]
    }
}

/// Deck of `g` in vertex order.
pub fn make_deck<G: Deckable + ?Sized>(g: &G) -> Deck {
    g.deck()
}

/// Equality of decks as multisets of isomorphism classes.
pub fn exact_deck_equal(a: &Deck, b: &Deck) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut ka: Vec<CardClass> = a.cards.iter().map(Card::class).collect();
    let mut kb: Vec<CardClass> = b.cards.iter().map(Card::class).collect();
    ka.sort_unstable();
    kb.sort_unstable();
    ka == kb
}
