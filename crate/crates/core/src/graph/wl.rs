//! Colour-refinement signatures of bipartite incidence matrices.
//!
//! Rows and columns start from a seven-number local fingerprint and are
//! refined for a fixed number of rounds. Colours are combined with
//! [`hash_words`], a fixed SplitMix64-based fold, so signatures are stable
//! across runs, platforms and builds.

use serde::{Deserialize, Serialize};

use super::types::BipartiteIncidence;
use crate::rng::splitmix64;

/// Refinement rounds used by the reconstructors.
pub const DEFAULT_WL_STEPS: usize = 3;

/// Sorted row colours, sorted column colours and the matrix shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WlSignature {
    pub rows: Vec<u64>,
    pub cols: Vec<u64>,
    pub shape: (usize, usize),
}

/// Order-sensitive 64-bit hash of a word sequence.
pub fn hash_words<I: IntoIterator<Item = u64>>(words: I) -> u64 {
    let mut h = 0x243F_6A88_85A3_08D3u64;
    let mut len = 0u64;
    for w in words {
        h = splitmix64(h ^ w);
        len += 1;
    }
    splitmix64(h ^ len.rotate_left(32))
}

/// Seven local statistics per vertex: degree, sum and sum of squares of
/// neighbour degrees, sums over the second neighbourhood, the third
/// neighbourhood sum, and the number of distinct neighbour degrees.
fn local_features(m: &BipartiteIncidence) -> (Vec<[u64; 7]>, Vec<[u64; 7]>) {
    let (u, v) = m.shape();
    let rd: Vec<u64> = m.row_sums().into_iter().map(|x| x as u64).collect();
    let cd: Vec<u64> = m.col_sums().into_iter().map(|x| x as u64).collect();
    let row_dot = |x: &[u64]| -> Vec<u64> {
        (0..u)
            .map(|r| {
                (0..v)
                    .filter(|&c| m.get(r, c))
                    .map(|c| x[c])
                    .fold(0u64, u64::wrapping_add)
            })
            .collect()
    };
    let col_dot = |x: &[u64]| -> Vec<u64> {
        (0..v)
            .map(|c| {
                (0..u)
                    .filter(|&r| m.get(r, c))
                    .map(|r| x[r])
                    .fold(0u64, u64::wrapping_add)
            })
            .collect()
    };
    let sq = |x: &[u64]| x.iter().map(|a| a.wrapping_mul(*a)).collect::<Vec<_>>();

    let r_n = row_dot(&cd);
    let r_n_sq = row_dot(&sq(&cd));
    let c_n = col_dot(&rd);
    let c_n_sq = col_dot(&sq(&rd));
    let r_nn = row_dot(&c_n);
    let r_nn_sq = row_dot(&c_n_sq);
    let c_nn = col_dot(&r_n);
    let c_nn_sq = col_dot(&r_n_sq);
    let r_nnn = row_dot(&c_nn);
    let c_nnn = col_dot(&r_nn);

    let distinct = |degs: Vec<u64>| {
        let mut d = degs;
        d.sort_unstable();
        d.dedup();
        d.len() as u64
    };
    let rows = (0..u)
        .map(|r| {
            let nd = distinct((0..v).filter(|&c| m.get(r, c)).map(|c| cd[c]).collect());
            [rd[r], r_n[r], r_n_sq[r], r_nn[r], r_nn_sq[r], r_nnn[r], nd]
        })
        .collect();
    let cols = (0..v)
        .map(|c| {
            let nd = distinct((0..u).filter(|&r| m.get(r, c)).map(|r| rd[r]).collect());
            [cd[c], c_n[c], c_n_sq[c], c_nn[c], c_nn_sq[c], c_nnn[c], nd]
        })
        .collect();
    (rows, cols)
}

/// Refinement signature after `steps` rounds; `((), (), shape)` for an empty matrix.
pub fn wl_signature(m: &BipartiteIncidence, steps: usize) -> WlSignature {
    let (u, v) = m.shape();
    if u == 0 || v == 0 {
        return WlSignature {
            rows: Vec::new(),
            cols: Vec::new(),
            shape: (u, v),
        };
    }
    let (rf, cf) = local_features(m);
    let mut rc: Vec<u64> = rf.iter().map(|f| hash_words(f.iter().copied())).collect();
    let mut cc: Vec<u64> = cf.iter().map(|f| hash_words(f.iter().copied())).collect();
    for _ in 0..steps {
        let next_r: Vec<u64> = (0..u)
            .map(|r| {
                let mut nbs: Vec<u64> = (0..v).filter(|&c| m.get(r, c)).map(|c| cc[c]).collect();
                nbs.sort_unstable();
                hash_words(std::iter::once(rc[r]).chain(nbs))
            })
            .collect();
        let next_c: Vec<u64> = (0..v)
            .map(|c| {
                let mut nbs: Vec<u64> = (0..u).filter(|&r| m.get(r, c)).map(|r| rc[r]).collect();
                nbs.sort_unstable();
                hash_words(std::iter::once(cc[c]).chain(nbs))
            })
            .collect();
        rc = next_r;
        cc = next_c;
    }
    rc.sort_unstable();
    cc.sort_unstable();
    WlSignature {
        rows: rc,
        cols: cc,
        shape: (u, v),
    }
}
