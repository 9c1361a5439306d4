//! Invariants recoverable from a deck by counting (Kelly's lemma).

use std::collections::BTreeMap;

use super::deck::{Card, Deck};
use crate::error::{Error, Result};

/// Edge count of the graph behind `deck`: each edge survives on all but two cards.
pub fn kelly_edge_count(deck: &Deck) -> Result<usize> {
    let n = deck.len();
    if n < 3 {
        return Err(Error::TooSmall {
            what: "deck size",
            min: 3,
            got: n,
        });
    }
    let total: usize = deck.cards.iter().map(Card::edge_count).sum();
    if !total.is_multiple_of(n - 2) {
        return Err(Error::MalformedDeck(format!(
            "card edge total {total} is not divisible by {}",
            n - 2
        )));
    }
    Ok(total / (n - 2))
}

/// Degree of the deleted vertex of each card, in card order.
pub fn kelly_degrees(deck: &Deck) -> Result<Vec<usize>> {
    let m = kelly_edge_count(deck)?;
    deck.cards
        .iter()
        .map(|c| {
            m.checked_sub(c.edge_count()).ok_or_else(|| {
                Error::MalformedDeck(format!(
                    "card has {} edges but the graph has {m}",
                    c.edge_count()
                ))
            })
        })
        .collect()
}

/// Triangle count of the graph behind a vertex-deleted deck: each triangle survives on `n - 3` cards.
pub fn kelly_triangle_count(deck: &Deck) -> Result<usize> {
    let n = deck.len();
    if n < 4 {
        return Err(Error::TooSmall {
            what: "deck size",
            min: 4,
            got: n,
        });
    }
    let mut total = 0;
    for c in &deck.cards {
        match c {
            Card::Vertex { graph } => total += graph.triangle_count(),
            _ => {
                return Err(Error::MalformedDeck(
                    "triangle counting needs vertex-deleted cards".into(),
                ))
            }
        }
    }
    if total % (n - 3) != 0 {
        return Err(Error::MalformedDeck(format!(
            "card triangle total {total} is not divisible by {}",
            n - 3
        )));
    }
    Ok(total / (n - 3))
}

/// Multiplicity of each value.
pub fn value_counts(values: &[usize]) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for &v in values {
        *out.entry(v).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::deck::make_deck;
    use crate::graph::types::Graph;
    use proptest::prelude::*;

    fn random_graph(n: usize, seed: u64) -> Graph {
        use rand::Rng;
        let mut rng = crate::rng::seeded(seed);
        let p: f64 = rng.gen_range(0.1..0.9);
        let mut g = Graph::empty(n).unwrap();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(p) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    #[test]
    fn small_cases() {
        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let d = make_deck(&k4);
        assert_eq!(kelly_edge_count(&d).unwrap(), 6);
        assert_eq!(kelly_degrees(&d).unwrap(), vec![3; 4]);
        assert_eq!(kelly_triangle_count(&d).unwrap(), 4);
    }

    #[test]
    fn malformed_totals_are_rejected() {
        let mut d = make_deck(&Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap());
        d.cards[0] = Card::Vertex {
            graph: Graph::from_edges(3, &[(0, 1)]).unwrap(),
        };
        assert!(matches!(kelly_edge_count(&d), Err(Error::MalformedDeck(_))));
    }

    proptest! {
        #[test]
        fn counts_are_exact(n in 4usize..13, seed in any::<u64>()) {
            let g = random_graph(n, seed);
            let d = make_deck(&g).scrambled(&mut crate::rng::seeded(seed ^ 1));
            prop_assert_eq!(kelly_edge_count(&d).unwrap(), g.edge_count());
            prop_assert_eq!(kelly_triangle_count(&d).unwrap(), g.triangle_count());
            let mut got = kelly_degrees(&d).unwrap();
            let mut want = g.degrees();
            got.sort_unstable();
            want.sort_unstable();
            prop_assert_eq!(got, want);
        }
    }
}
