use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use super::flow::FlowNetwork;
use super::profile::{local_types, neighbor_profile, remove_from_profile, VertexType};
use crate::error::{Error, Result};
use crate::graph::{
    wl_signature, BipartiteIncidence, Card, Deck, Side, WlSignature, DEFAULT_WL_STEPS,
};

const COST_SCALE: f64 = 1_000_000.0;

/// Per-type neighbour requirements of one deleted vertex.
pub type Requirements = BTreeMap<VertexType, usize>;

/// A card re-oriented so the part opposite the deleted vertex is the columns.
struct OrientedCard {
    side: Side,
    matrix: BipartiteIncidence,
}

impl OrientedCard {
    fn new(card: &BipartiteIncidence, side: Side) -> Self {
        let matrix = match side {
            Side::Row => card.clone(),
            Side::Column => card.transpose(),
        };
        Self { side, matrix }
    }

    /// Undo the orientation so signatures from both parts are comparable.
    fn restore(&self, m: BipartiteIncidence) -> BipartiteIncidence {
        match self.side {
            Side::Row => m,
            Side::Column => m.transpose(),
        }
    }

    fn opposite_degrees(&self) -> Vec<usize> {
        self.matrix.col_sums()
    }

    fn opposite_types(&self) -> Vec<VertexType> {
        local_types(&self.matrix, Side::Column)
    }
}

fn counts<T: Ord + Clone>(items: &[T]) -> BTreeMap<T, usize> {
    let mut out = BTreeMap::new();
    for x in items {
        *out.entry(x.clone()).or_insert(0) += 1;
    }
    out
}

/// Types of every deleted vertex, given the other part's global degree counts.
fn deleted_types(
    cards: &[OrientedCard],
    degrees: &[usize],
    opposite_degree_counts: &BTreeMap<usize, usize>,
) -> Result<Vec<VertexType>> {
    cards
        .iter()
        .zip(degrees)
        .map(|(c, &d)| {
            let profile = neighbor_profile(opposite_degree_counts, &c.opposite_degrees())?;
            if profile.len() != d {
                return Err(Error::InconsistentCard(format!(
                    "profile has {} entries for degree {d}",
                    profile.len()
                )));
            }
            Ok(VertexType { degree: d, profile })
        })
        .collect()
}

/// How many neighbours of each opposite type one deleted vertex needs.
///
/// A neighbour of type `(d, p)` appears on the card as `(d - 1, p - deg)`.
/// Scanning opposite types from the largest down, the number of unshifted
/// vertices of a type is its observed count minus what larger types have
/// already shifted into it; whatever is missing from the global count are
/// the neighbours.
pub fn requirements(
    card: &BipartiteIncidence,
    side: Side,
    removed_degree: usize,
    opposite_types_desc: &[VertexType],
    opposite_type_counts: &BTreeMap<VertexType, usize>,
) -> Result<Requirements> {
    let oriented = OrientedCard::new(card, side);
    requirements_oriented(
        &oriented,
        removed_degree,
        opposite_types_desc,
        opposite_type_counts,
    )
}

fn requirements_oriented(
    card: &OrientedCard,
    removed_degree: usize,
    opposite_types_desc: &[VertexType],
    opposite_type_counts: &BTreeMap<VertexType, usize>,
) -> Result<Requirements> {
    let observed = counts(&card.opposite_types());
    let mut shifted_in: BTreeMap<VertexType, usize> = BTreeMap::new();
    let mut reqs = Requirements::new();
    for t in opposite_types_desc {
        let global = opposite_type_counts.get(t).copied().unwrap_or(0) as i64;
        let seen = observed.get(t).copied().unwrap_or(0) as i64;
        let shifted = shifted_in.get(t).copied().unwrap_or(0) as i64;
        let needed = global - (seen - shifted);
        if needed < 0 {
            return Err(Error::InconsistentDeck(format!(
                "type {t:?} over-observed by {}",
                -needed
            )));
        }
        if needed > 0 {
            reqs.insert(t.clone(), needed as usize);
            let Some(shrunk_degree) = t.degree.checked_sub(1) else {
                return Err(Error::InconsistentDeck(
                    "degree-0 vertex required as a neighbour".into(),
                ));
            };
            let shrunk = VertexType {
                degree: shrunk_degree,
                profile: remove_from_profile(&t.profile, removed_degree),
            };
            *shifted_in.entry(shrunk).or_insert(0) += needed as usize;
        }
    }
    Ok(reqs)
}

/// Signatures of every two-vertex deletion of a card, grouped by the local
/// type of the second deleted vertex.
fn two_deletion_signatures(card: &OrientedCard) -> HashMap<VertexType, Vec<WlSignature>> {
    let types = card.opposite_types();
    let mut out: HashMap<VertexType, Vec<WlSignature>> = HashMap::new();
    for (c, t) in types.into_iter().enumerate() {
        let sub = card.restore(card.matrix.delete_col(c));
        out.entry(t)
            .or_default()
            .push(wl_signature(&sub, DEFAULT_WL_STEPS));
    }
    for sigs in out.values_mut() {
        sigs.sort();
    }
    out
}

/// Cosine similarity of two sorted colour lists viewed as multisets.
fn cosine(a: &[u64], b: &[u64]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let (ca, cb) = (counts(a), counts(b));
    let dot: usize = ca
        .iter()
        .filter_map(|(k, x)| cb.get(k).map(|y| x * y))
        .sum();
    let na: usize = ca.values().map(|x| x * x).sum();
    let nb: usize = cb.values().map(|x| x * x).sum();
    dot as f64 / ((na as f64).sqrt() * (nb as f64).sqrt())
}

/// Dice overlap `2|A ∩ B| / (|A| + |B|)` of two sorted multisets; 0 when both are empty.
fn dice(a: &[WlSignature], b: &[WlSignature]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let (mut i, mut j, mut common) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    2.0 * common as f64 / (a.len() + b.len()) as f64
}

/// Tie-breaking key of a card: its signature, then its sorted similarities to all cards.
struct SortKey {
    signature: WlSignature,
    similarities: Vec<f64>,
}

impl SortKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.signature.cmp(&other.signature).then_with(|| {
            for (x, y) in self.similarities.iter().zip(&other.similarities) {
                match x.total_cmp(y) {
                    Ordering::Equal => {}
                    o => return o,
                }
            }
            self.similarities.len().cmp(&other.similarities.len())
        })
    }
}

fn ranks(keys: &[SortKey]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut rank = vec![0; keys.len()];
    for (r, i) in order.into_iter().enumerate() {
        rank[i] = r;
    }
    rank
}

fn empty_lookup<'a>(
    map: &'a HashMap<VertexType, Vec<WlSignature>>,
    key: &VertexType,
) -> &'a [WlSignature] {
    map.get(key).map_or(&[], Vec::as_slice)
}

/// Reconstructs a `u x v` bipartite graph from its deck.
///
/// Degrees and neighbour-degree profiles of every deleted vertex are
/// recovered exactly by counting. Those fix, for each pair of vertex types,
/// how many edges every row and column needs; edges inside each type block
/// are then placed by a min-cost flow whose costs reward agreement between
/// the two-deletion signatures of the row card and the column card.
/// Infeasible blocks keep whatever flow fits. Degenerate shapes (an empty
/// part, or a single edge slot) return the all-zero matrix.
pub fn reconstruct_bipartite(deck: &Deck, u: usize, v: usize) -> Result<BipartiteIncidence> {
    if u == 0 || v == 0 || (u == 1 && v == 1) {
        return Ok(BipartiteIncidence::zeros(u, v));
    }
    let mut row_cards = Vec::with_capacity(u);
    let mut col_cards = Vec::with_capacity(v);
    for card in &deck.cards {
        match card {
            Card::Row { matrix } if matrix.shape() == (u - 1, v) => {
                row_cards.push(OrientedCard::new(matrix, Side::Row))
            }
            Card::Column { matrix } if matrix.shape() == (u, v - 1) => {
                col_cards.push(OrientedCard::new(matrix, Side::Column))
            }
            other => {
                return Err(Error::MalformedDeck(format!(
                    "card of unexpected kind or shape: {:?}",
                    other.deleted_side()
                )))
            }
        }
    }
    if row_cards.len() != u || col_cards.len() != v {
        return Err(Error::MalformedDeck(format!(
            "expected {u} row cards and {v} column cards, found {} and {}",
            row_cards.len(),
            col_cards.len()
        )));
    }

    let total: usize = deck.cards.iter().map(Card::edge_count).sum();
    if !total.is_multiple_of(u + v - 2) {
        return Err(Error::MalformedDeck(format!(
            "card edge total {total} is not divisible by {}",
            u + v - 2
        )));
    }
    let m = total / (u + v - 2);
    let degree_of = |c: &OrientedCard| {
        m.checked_sub(c.matrix.edge_count())
            .ok_or_else(|| Error::MalformedDeck(format!("card has more than {m} edges")))
    };
    let du: Vec<usize> = row_cards.iter().map(degree_of).collect::<Result<_>>()?;
    let dv: Vec<usize> = col_cards.iter().map(degree_of).collect::<Result<_>>()?;

    let u_types = deleted_types(&row_cards, &du, &counts(&dv))?;
    let v_types = deleted_types(&col_cards, &dv, &counts(&du))?;
    let u_type_counts = counts(&u_types);
    let v_type_counts = counts(&v_types);
    let u_types_desc: Vec<VertexType> = u_type_counts.keys().rev().cloned().collect();
    let v_types_desc: Vec<VertexType> = v_type_counts.keys().rev().cloned().collect();

    let u_reqs: Vec<Requirements> = row_cards
        .iter()
        .zip(&du)
        .map(|(c, &d)| requirements_oriented(c, d, &v_types_desc, &v_type_counts))
        .collect::<Result<_>>()?;
    let v_reqs: Vec<Requirements> = col_cards
        .iter()
        .zip(&dv)
        .map(|(c, &d)| requirements_oriented(c, d, &u_types_desc, &u_type_counts))
        .collect::<Result<_>>()?;

    let u_two: Vec<_> = row_cards.iter().map(two_deletion_signatures).collect();
    let v_two: Vec<_> = col_cards.iter().map(two_deletion_signatures).collect();

    let card_sigs: Vec<WlSignature> = row_cards
        .iter()
        .chain(&col_cards)
        .map(|c| wl_signature(&c.restore(c.matrix.clone()), DEFAULT_WL_STEPS))
        .collect();
    let total_cards = u + v;
    let mut sim = vec![vec![1.0f64; total_cards]; total_cards];
    for i in 0..total_cards {
        for j in i + 1..total_cards {
            let (a, b) = (&card_sigs[i], &card_sigs[j]);
            let s = (cosine(&a.rows, &b.rows) + cosine(&a.cols, &b.cols)) / 2.0;
            sim[i][j] = s;
            sim[j][i] = s;
        }
    }
    let key_of = |i: usize| {
        let mut similarities = sim[i].clone();
        similarities.sort_by(f64::total_cmp);
        SortKey {
            signature: card_sigs[i].clone(),
            similarities,
        }
    };
    let u_keys: Vec<SortKey> = (0..u).map(key_of).collect();
    let v_keys: Vec<SortKey> = (u..u + v).map(key_of).collect();
    let u_rank = ranks(&u_keys);
    let v_rank = ranks(&v_keys);

    let by_type = |types: &[VertexType], keys: &[SortKey]| {
        let mut out: BTreeMap<VertexType, Vec<usize>> = BTreeMap::new();
        for (i, t) in types.iter().enumerate() {
            out.entry(t.clone()).or_default().push(i);
        }
        for idx in out.values_mut() {
            idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        }
        out
    };
    let rows_by_type = by_type(&u_types, &u_keys);
    let cols_by_type = by_type(&v_types, &v_keys);

    let mut adj = BipartiteIncidence::zeros(u, v);
    for r_type in &u_types_desc {
        for c_type in &v_types_desc {
            let r_idx = &rows_by_type[r_type];
            let c_idx = &cols_by_type[c_type];
            let col_conn = VertexType {
                degree: c_type.degree.saturating_sub(1),
                profile: remove_from_profile(&c_type.profile, r_type.degree),
            };
            let row_conn = VertexType {
                degree: r_type.degree.saturating_sub(1),
                profile: remove_from_profile(&r_type.profile, c_type.degree),
            };

            // Nodes: 0 source, 1 sink, then rows, then columns of this block.
            let mut net = FlowNetwork::new(2 + r_idx.len() + c_idx.len());
            let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
            for (a, &ri) in r_idx.iter().enumerate() {
                let cap = u_reqs[ri].get(c_type).copied().unwrap_or(0);
                if cap == 0 {
                    continue;
                }
                net.add_edge(0, 2 + a, cap as i64, 0);
                let u_conn = empty_lookup(&u_two[ri], &col_conn);
                let u_non = empty_lookup(&u_two[ri], c_type);
                for (b, &cj) in c_idx.iter().enumerate() {
                    if v_reqs[cj].get(r_type).copied().unwrap_or(0) == 0 {
                        continue;
                    }
                    let v_conn = empty_lookup(&v_two[cj], &row_conn);
                    let v_non = empty_lookup(&v_two[cj], r_type);
                    candidates.push((dice(u_conn, v_conn) - dice(u_non, v_non), a, b));
                }
            }
            for (b, &cj) in c_idx.iter().enumerate() {
                let cap = v_reqs[cj].get(r_type).copied().unwrap_or(0);
                if cap > 0 {
                    net.add_edge(2 + r_idx.len() + b, 1, cap as i64, 0);
                }
            }
            candidates.sort_by(|x, y| {
                y.0.total_cmp(&x.0)
                    .then(u_rank[r_idx[x.1]].cmp(&u_rank[r_idx[y.1]]))
                    .then(v_rank[c_idx[x.2]].cmp(&v_rank[c_idx[y.2]]))
            });
            let edges: Vec<_> = candidates
                .iter()
                .map(|&(conf, a, b)| {
                    let tie = (u_rank[r_idx[a]] * v + v_rank[c_idx[b]]) as i64;
                    let cost = (-conf * COST_SCALE).round() as i64 - tie;
                    (net.add_edge(2 + a, 2 + r_idx.len() + b, 1, cost), a, b)
                })
                .collect();
            net.min_cost_max_flow(0, 1);
            for (e, a, b) in edges {
                if net.flow(e) == 1 {
                    adj.set(r_idx[a], c_idx[b], true);
                }
            }
        }
    }
    Ok(adj)
}
