use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{kelly_edge_count, Card, Deck, Deckable};

/// Weights of the three score components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreWeights {
    pub deck: f64,
    pub degree: f64,
    pub edges: f64,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        Self {
            deck: 0.8,
            degree: 0.1,
            edges: 0.1,
        }
    }
}

impl ScoreWeights {
    /// Nonnegative, summing to one, with the deck term dominant.
    pub fn validate(&self) -> Result<()> {
        let all = [self.deck, self.degree, self.edges];
        if all.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Config(format!(
                "score weights must be nonnegative: {self:?}"
            )));
        }
        if ((all.iter().sum::<f64>()) - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "score weights must sum to 1: {self:?}"
            )));
        }
        if self.deck <= self.degree + self.edges {
            return Err(Error::Config(format!(
                "the deck weight must dominate: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Agreement between a candidate's deck and a target deck.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeckScore {
    pub s_deck: f64,
    pub s_deg: f64,
    pub s_e: f64,
    pub combined: f64,
}

impl DeckScore {
    pub const ZERO: Self = Self {
        s_deck: 0.0,
        s_deg: 0.0,
        s_e: 0.0,
        combined: 0.0,
    };

    pub fn is_exact(&self) -> bool {
        self.s_deck == 1.0
    }
}

/// Degree buckets implied by a deck: one per deleted-vertex kind, in the
/// order vertex, row, column, skipping kinds that do not occur.
pub fn deck_degree_buckets(deck: &Deck) -> Result<Vec<Vec<usize>>> {
    let m = kelly_edge_count(deck)?;
    let mut buckets: [Vec<usize>; 3] = Default::default();
    for card in &deck.cards {
        let d = m.checked_sub(card.edge_count()).ok_or_else(|| {
            Error::MalformedDeck(format!(
                "card has {} edges but the graph has {m}",
                card.edge_count()
            ))
        })?;
        let slot = match card {
            Card::Vertex { .. } => 0,
            Card::Row { .. } => 1,
            Card::Column { .. } => 2,
        };
        buckets[slot].push(d);
    }
    Ok(buckets.into_iter().filter(|b| !b.is_empty()).collect())
}

/// Scores `candidate` against `target`.
///
/// `s_deck` is the multiset intersection of card classes over the deck
/// size, `s_deg` one minus the summed per-bucket sorted degree error over
/// `4m`, and `s_e` one minus the relative edge-count error; the last two
/// are clipped to `[0, 1]`.
pub fn deck_score<G: Deckable + ?Sized>(
    candidate: &G,
    target: &Deck,
    weights: &ScoreWeights,
) -> Result<DeckScore> {
    let own = candidate.deck();
    if own.len() != target.len() {
        return Err(Error::DimensionMismatch {
            expected: target.len(),
            found: own.len(),
        });
    }
    let n = target.len();
    let mine = own.class_counts();
    let theirs = target.class_counts();
    let shared: usize = theirs
        .iter()
        .map(|(class, &k)| k.min(mine.get(class).copied().unwrap_or(0)))
        .sum();
    let s_deck = if n == 0 {
        1.0
    } else {
        shared as f64 / n as f64
    };

    let m = kelly_edge_count(target)?;
    let scale = m.max(1) as f64;
    let implied = deck_degree_buckets(target)?;
    let actual = candidate.degree_buckets();
    if implied.len() != actual.len() {
        return Err(Error::DimensionMismatch {
            expected: implied.len(),
            found: actual.len(),
        });
    }
    let mut degree_error = 0usize;
    for (want, got) in implied.iter().zip(&actual) {
        if want.len() != got.len() {
            return Err(Error::DimensionMismatch {
                expected: want.len(),
                found: got.len(),
            });
        }
        let (mut a, mut b) = (want.clone(), got.clone());
        a.sort_unstable();
        b.sort_unstable();
        degree_error += a.iter().zip(&b).map(|(x, y)| x.abs_diff(*y)).sum::<usize>();
    }
    let s_deg = (1.0 - degree_error as f64 / (4.0 * scale)).clamp(0.0, 1.0);
    let s_e = (1.0 - candidate.edge_count().abs_diff(m) as f64 / scale).clamp(0.0, 1.0);
    let combined = weights.deck * s_deck + weights.degree * s_deg + weights.edges * s_e;
    Ok(DeckScore {
        s_deck,
        s_deg,
        s_e,
        combined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{exact_deck_equal, BipartiteIncidence, Graph};
    use proptest::prelude::*;

    #[test]
    fn perfect_and_empty_guesses() {
        let k3 = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let w = ScoreWeights::default();
        let perfect = deck_score(&k3, &k3.deck(), &w).unwrap();
        assert_eq!(
            perfect,
            DeckScore {
                s_deck: 1.0,
                s_deg: 1.0,
                s_e: 1.0,
                combined: 1.0
            }
        );
        let empty = deck_score(&Graph::empty(3).unwrap(), &k3.deck(), &w).unwrap();
        assert_eq!(empty.s_deck, 0.0);
        assert_eq!(empty.s_e, 0.0);
        // Degrees (0, 0, 0) against (2, 2, 2): error 6 over 4 * 3.
        assert_eq!(empty.s_deg, 0.5);
        assert!(deck_score(&Graph::empty(4).unwrap(), &k3.deck(), &w).is_err());
    }

    #[test]
    fn weights_are_checked() {
        assert!(ScoreWeights::default().validate().is_ok());
        assert!(ScoreWeights {
            deck: 0.4,
            degree: 0.3,
            edges: 0.3
        }
        .validate()
        .is_err());
        assert!(ScoreWeights {
            deck: 0.9,
            degree: 0.1,
            edges: 0.1
        }
        .validate()
        .is_err());
    }

    #[test]
    fn bipartite_buckets_follow_sides() {
        let m = BipartiteIncidence::from_rows(&[vec![1, 1, 0], vec![1, 1, 1]]).unwrap();
        assert_eq!(
            deck_degree_buckets(&m.deck()).unwrap(),
            vec![vec![2, 3], vec![2, 2, 1]]
        );
        assert!(deck_score(
            &m,
            &m.scrambled(&mut crate::rng::seeded(2)).deck(),
            &ScoreWeights::default()
        )
        .unwrap()
        .is_exact());
    }

    fn graph_from(n: usize, mask: u64) -> Graph {
        let mut g = Graph::empty(n).unwrap();
        let mut bit = 0;
        for a in 0..n {
            for b in a + 1..n {
                if mask >> bit & 1 == 1 {
                    g.add_edge(a, b);
                }
                bit += 1;
            }
        }
        g
    }

    proptest! {
        #[test]
        fn components_in_range_and_exactness(n in 3usize..8, a in any::<u64>(), b in any::<u64>()) {
            let (g, h) = (graph_from(n, a), graph_from(n, b));
            let s = deck_score(&h, &g.deck(), &ScoreWeights::default()).unwrap();
            for x in [s.s_deck, s.s_deg, s.s_e, s.combined] {
                prop_assert!((0.0..=1.0).contains(&x));
            }
            prop_assert_eq!(s.is_exact(), exact_deck_equal(&h.deck(), &g.deck()));
        }
    }
}
