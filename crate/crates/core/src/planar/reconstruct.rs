use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, Combinations};
use crate::error::{Error, Result};
use crate::graph::{
    exact_deck_equal, kelly_degrees, kelly_edge_count, kelly_triangle_count, make_deck,
    value_counts, Card, Deck, Graph,
};

/// Candidates with more neighbour sets than this are not enumerated.
pub const AMBIGUITY_CAP: u64 = 2000;

/// How many neighbours of each card degree the deleted vertex must have.
///
/// A neighbour with card degree `x` has degree `x + 1` in the graph. Sweeping
/// degrees upward, the carry is the number of card vertices at the previous
/// degree that must be neighbours; it has to stay within the supply at each
/// degree and return to zero. Returns `None` when no assignment exists.
pub fn reattachment_requirements(
    global_degree_counts: &BTreeMap<usize, usize>,
    card_degree_counts: &BTreeMap<usize, usize>,
    deleted_degree: usize,
) -> Option<BTreeMap<usize, usize>> {
    let mut target = global_degree_counts.clone();
    match target.get_mut(&deleted_degree) {
        Some(c) if *c > 1 => *c -= 1,
        Some(_) => {
            target.remove(&deleted_degree);
        }
        None => return None,
    }
    let keys = target.keys().chain(card_degree_counts.keys());
    let (Some(&lo), Some(&hi)) = (keys.clone().min(), keys.max()) else {
        return (deleted_degree == 0).then(BTreeMap::new);
    };
    let mut req = BTreeMap::new();
    let mut carry: i64 = 0;
    for x in lo..=hi + 1 {
        let have = card_degree_counts.get(&x).copied().unwrap_or(0) as i64;
        let want = target.get(&x).copied().unwrap_or(0) as i64;
        let next = carry + have - want;
        if next < 0 || next > have {
            return None;
        }
        if next > 0 {
            req.insert(x, next as usize);
        }
        carry = next;
    }
    (carry == 0 && req.values().sum::<usize>() == deleted_degree).then_some(req)
}

/// A card and a feasible reattachment profile for its deleted vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub card: usize,
    pub requirements: BTreeMap<usize, usize>,
    pub ambiguity: u64,
}

/// Feasible candidates, least ambiguous first (ties by card position).
pub fn reattachment_candidates(deck: &Deck) -> Result<Vec<Candidate>> {
    let degrees = kelly_degrees(deck)?;
    let global = value_counts(&degrees);
    let mut out = Vec::new();
    for (i, card) in deck.cards.iter().enumerate() {
        let Card::Vertex { graph } = card else {
            return Err(Error::MalformedDeck(
                "planar reconstruction needs vertex-deleted cards".into(),
            ));
        };
        let card_counts = value_counts(&graph.degrees());
        if let Some(req) = reattachment_requirements(&global, &card_counts, degrees[i]) {
            let ambiguity = req
                .iter()
                .map(|(x, &k)| binomial(card_counts[x], k))
                .fold(1u64, u64::saturating_mul);
            out.push(Candidate {
                card: i,
                requirements: req,
                ambiguity,
            });
        }
    }
    out.sort_by_key(|c| c.ambiguity);
    Ok(out)
}

/// Reconstructs a graph on `n` vertices from its vertex-deleted deck.
///
/// Each card is extended by one vertex whose neighbours are drawn from the
/// degree classes fixed by [`reattachment_requirements`]; candidates are
/// tried least ambiguous first, pruned by the triangle count, and accepted
/// only on exact deck equality. Candidates above [`AMBIGUITY_CAP`] are
/// skipped.
pub fn reconstruct_planar(deck: &Deck, n: usize) -> Result<Graph> {
    if n < 4 {
        return Err(Error::TooSmall {
            what: "vertex count",
            min: 4,
            got: n,
        });
    }
    if deck.len() != n {
        return Err(Error::MalformedDeck(format!(
            "expected {n} cards, found {}",
            deck.len()
        )));
    }
    for c in &deck.cards {
        match c {
            Card::Vertex { graph } if graph.vertex_count() == n - 1 => {}
            _ => {
                return Err(Error::MalformedDeck(format!(
                    "every card must be a graph on {} vertices",
                    n - 1
                )))
            }
        }
    }
    kelly_edge_count(deck)?;
    let triangles = kelly_triangle_count(deck)?;
    let candidates = reattachment_candidates(deck)?;
    if !candidates.is_empty() && candidates.iter().all(|c| c.ambiguity > AMBIGUITY_CAP) {
        return Err(Error::Ambiguous { cap: AMBIGUITY_CAP });
    }
    let mut tried = 0;
    for cand in candidates.iter().filter(|c| c.ambiguity <= AMBIGUITY_CAP) {
        let Card::Vertex { graph: card } = &deck.cards[cand.card] else {
            unreachable!()
        };
        let card_triangles = card.triangle_count();
        let degrees = card.degrees();
        let pools: Vec<Vec<Vec<usize>>> = cand
            .requirements
            .iter()
            .map(|(&d, &k)| {
                let class: Vec<usize> = (0..card.vertex_count())
                    .filter(|&x| degrees[x] == d)
                    .collect();
                Combinations::new(class.len(), k)
                    .map(|c| c.into_iter().map(|i| class[i]).collect())
                    .collect()
            })
            .collect();
        let mut pick = vec![0usize; pools.len()];
        loop {
            let neighbors: Vec<usize> = pick
                .iter()
                .zip(&pools)
                .flat_map(|(&i, p)| p[i].iter().copied())
                .collect();
            if card_triangles + card.edges_within(&neighbors) == triangles {
                tried += 1;
                let h = card.with_new_vertex(&neighbors)?;
                if exact_deck_equal(&make_deck(&h), deck) {
                    debug_assert_eq!(h.triangle_count(), triangles);
                    return Ok(h);
                }
            }
            if !advance(&mut pick, &pools) {
                break;
            }
        }
    }
    Err(Error::NoReconstruction { candidates: tried })
}

/// Odometer step over the cartesian product, last position fastest.
fn advance(pick: &mut [usize], pools: &[Vec<Vec<usize>>]) -> bool {
    for i in (0..pick.len()).rev() {
        pick[i] += 1;
        if pick[i] < pools[i].len() {
            return true;
        }
        pick[i] = 0;
    }
    false
}
