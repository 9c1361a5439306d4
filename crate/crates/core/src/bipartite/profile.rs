use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteIncidence, Side};

/// A vertex's degree together with the sorted degrees of its neighbours.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexType {
    pub degree: usize,
    pub profile: Vec<usize>,
}

/// Sorted degrees of the neighbours of a deleted vertex.
///
/// `global_counts` is the degree distribution of the opposite part in the
/// whole graph; `card_degrees` are the same vertices' degrees on the card.
/// A neighbour of degree `k` shows up on the card with degree `k - 1`, so
/// `card_k = global_k - a_k + a_{k+1}` where `a_k` counts neighbours of
/// degree `k`; solving downward from the top degree recovers every `a_k`.
pub fn neighbor_profile(
    global_counts: &BTreeMap<usize, usize>,
    card_degrees: &[usize],
) -> Result<Vec<usize>> {
    let mut card_counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &d in card_degrees {
        *card_counts.entry(d).or_insert(0) += 1;
    }
    let Some(max_deg) = global_counts
        .keys()
        .chain(card_counts.keys())
        .max()
        .copied()
    else {
        return Ok(Vec::new());
    };
    let mut profile = Vec::new();
    let mut shift: i64 = 0;
    for k in (0..=max_deg).rev() {
        let g = global_counts.get(&k).copied().unwrap_or(0) as i64;
        let c = card_counts.get(&k).copied().unwrap_or(0) as i64;
        let a_k = g + shift - c;
        if a_k < 0 {
            return Err(Error::InconsistentCard(format!(
                "negative neighbour count {a_k} at degree {k}"
            )));
        }
        profile.extend(std::iter::repeat_n(k, a_k as usize));
        shift = a_k;
    }
    profile.reverse();
    Ok(profile)
}

/// `profile` with one copy of `value` removed, if present.
pub fn remove_from_profile(profile: &[usize], value: usize) -> Vec<usize> {
    let mut out = profile.to_vec();
    if let Some(pos) = out.iter().position(|&x| x == value) {
        out.remove(pos);
    }
    out
}

/// Local type of every vertex on `side` of `m`.
pub fn local_types(m: &BipartiteIncidence, side: Side) -> Vec<VertexType> {
    let (u, v) = m.shape();
    match side {
        Side::Column => {
            let rd = m.row_sums();
            (0..v)
                .map(|c| {
                    let mut profile: Vec<usize> =
                        (0..u).filter(|&r| m.get(r, c)).map(|r| rd[r]).collect();
                    profile.sort_unstable();
                    VertexType {
                        degree: profile.len(),
                        profile,
                    }
                })
                .collect()
        }
        Side::Row => {
            let cd = m.col_sums();
            (0..u)
                .map(|r| {
                    let mut profile: Vec<usize> =
                        (0..v).filter(|&c| m.get(r, c)).map(|c| cd[c]).collect();
                    profile.sort_unstable();
                    VertexType {
                        degree: profile.len(),
                        profile,
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn recovers_a_simple_profile() {
        // Opposite part has degrees {3, 2, 2, 1}; the deleted vertex saw the 3 and one 2.
        let global = BTreeMap::from([(3, 1), (2, 2), (1, 1)]);
        let card = [2, 1, 2, 1];
        assert_eq!(neighbor_profile(&global, &card).unwrap(), vec![2, 3]);
        assert_eq!(
            neighbor_profile(&BTreeMap::new(), &[]).unwrap(),
            Vec::<usize>::new()
        );
    }

    #[test]
    fn inconsistent_card_is_reported() {
        let global = BTreeMap::from([(1, 1)]);
        assert!(matches!(
            neighbor_profile(&global, &[2]),
            Err(Error::InconsistentCard(_))
        ));
    }

    #[test]
    fn remove_one_copy() {
        assert_eq!(remove_from_profile(&[1, 2, 2, 3], 2), vec![1, 2, 3]);
        assert_eq!(remove_from_profile(&[1, 3], 2), vec![1, 3]);
    }

    proptest! {
        #[test]
        fn profile_matches_truth(cells in prop::collection::vec(0u8..2, 30), row in 0usize..5) {
            let rows: Vec<Vec<u8>> = cells.chunks(6).map(<[u8]>::to_vec).collect();
            let m = BipartiteIncidence::from_rows(&rows).unwrap();
            let col_deg = m.col_sums();
            let mut global = BTreeMap::new();
            for &d in &col_deg { *global.entry(d).or_insert(0) += 1; }
            let card = m.delete_row(row);
            let want: Vec<usize> = {
                let mut p: Vec<usize> = (0..6).filter(|&c| m.get(row, c)).map(|c| col_deg[c]).collect();
                p.sort_unstable();
                p
            };
            prop_assert_eq!(neighbor_profile(&global, &card.col_sums()).unwrap(), want);
        }
    }
}
