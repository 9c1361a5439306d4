//! Canonical labelling of vertex-coloured graphs.
//!
//! Individualisation-refinement: ordered colour refinement to an equitable
//! partition, then branching on the first smallest non-singleton cell. The
//! canonical form is the least leaf encoding. Two automorphism prunings keep
//! the search small: children in the same orbit (under automorphisms found so
//! far that fix the current path) are skipped, and a leaf that reproduces the
//! best encoding abandons its subtree back to the point where it diverged
//! from the best path.

use serde::{Deserialize, Serialize};

use super::types::{BipartiteIncidence, Graph};

/// Label-independent encoding of an isomorphism class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalForm(Vec<u64>);

/// Canonical form of an uncoloured graph.
pub fn canonical_form(g: &Graph) -> CanonicalForm {
    canonical_labeling(g.adjacency(), &vec![0; g.vertex_count()]).0
}

/// Canonical form of a bipartite graph; rows and columns are never exchanged.
pub fn bipartite_canonical_form(m: &BipartiteIncidence) -> CanonicalForm {
    let (u, v) = m.shape();
    let mut adj = vec![0u64; u + v];
    for r in 0..u {
        for c in 0..v {
            if m.get(r, c) {
                adj[r] |= 1 << (u + c);
                adj[u + c] |= 1 << r;
            }
        }
    }
    let colors: Vec<u32> = (0..u + v).map(|x| u32::from(x >= u)).collect();
    let (CanonicalForm(mut words), _) = canonical_labeling(&adj, &colors);
    words.insert(0, u as u64);
    CanonicalForm(words)
}

pub fn isomorphic(g: &Graph, h: &Graph) -> bool {
    g.vertex_count() == h.vertex_count()
        && g.edge_count() == h.edge_count()
        && canonical_form(g) == canonical_form(h)
}

/// Canonical form plus the canonical order (`order[i]` is the vertex placed at position `i`).
pub fn canonical_labeling(adj: &[u64], colors: &[u32]) -> (CanonicalForm, Vec<usize>) {
    let n = adj.len();
    assert!(n <= 64 && colors.len() == n);
    let mut distinct: Vec<u32> = colors.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let cells: Vec<Vec<usize>> = distinct
        .iter()
        .map(|&c| (0..n).filter(|&v| colors[v] == c).collect())
        .filter(|cell: &Vec<usize>| !cell.is_empty())
        .collect();
    let mut search = Search {
        adj,
        colors,
        best: None,
        automorphisms: Vec::new(),
    };
    let mut path = Vec::new();
    search.visit(cells, &mut path);
    let best = search.best.expect("search always reaches a leaf");
    (CanonicalForm(best.encoding), best.order)
}

struct Leaf {
    encoding: Vec<u64>,
    order: Vec<usize>,
    path: Vec<usize>,
}

struct Search<'a> {
    adj: &'a [u64],
    colors: &'a [u32],
    best: Option<Leaf>,
    automorphisms: Vec<Vec<usize>>,
}

impl Search<'_> {
    /// Returns the depth to jump back to, if the subtree was proven redundant.
    fn visit(&mut self, mut cells: Vec<Vec<usize>>, path: &mut Vec<usize>) -> Option<usize> {
        refine(self.adj, &mut cells);
        if cells.len() == self.adj.len() {
            return self.leaf(&cells, path);
        }
        let target = (0..cells.len())
            .filter(|&i| cells[i].len() > 1)
            .min_by_key(|&i| cells[i].len())
            .expect("non-discrete partition has a non-singleton cell");
        let mut members = cells[target].clone();
        members.sort_unstable();
        let depth = path.len();
        let mut explored: Vec<usize> = Vec::new();
        for &w in &members {
            if !explored.is_empty() {
                let orbits = self.orbits_fixing(path);
                if explored.iter().any(|&x| orbits.find(x) == orbits.find(w)) {
                    continue;
                }
            }
            let mut child = Vec::with_capacity(cells.len() + 1);
            child.extend_from_slice(&cells[..target]);
            child.push(vec![w]);
            child.push(cells[target].iter().copied().filter(|&x| x != w).collect());
            child.extend_from_slice(&cells[target + 1..]);
            path.push(w);
            let jump = self.visit(child, path);
            path.pop();
            explored.push(w);
            if let Some(level) = jump {
                if level < depth {
                    return Some(level);
                }
            }
        }
        None
    }

    fn leaf(&mut self, cells: &[Vec<usize>], path: &[usize]) -> Option<usize> {
        let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
        let encoding = encode(self.adj, self.colors, &order);
        match &self.best {
            None => {
                self.best = Some(Leaf {
                    encoding,
                    order,
                    path: path.to_vec(),
                });
                None
            }
            Some(best) if encoding < best.encoding => {
                self.best = Some(Leaf {
                    encoding,
                    order,
                    path: path.to_vec(),
                });
                None
            }
            Some(best) if encoding == best.encoding => {
                let mut gamma = vec![0; order.len()];
                for (i, &v) in order.iter().enumerate() {
                    gamma[v] = best.order[i];
                }
                let diverge = path
                    .iter()
                    .zip(&best.path)
                    .take_while(|(a, b)| a == b)
                    .count();
                if gamma.iter().enumerate().any(|(i, &g)| i != g) {
                    self.automorphisms.push(gamma);
                }
                Some(diverge)
            }
            Some(_) => None,
        }
    }

    fn orbits_fixing(&self, path: &[usize]) -> UnionFind {
        let mut uf = UnionFind::new(self.adj.len());
        for gamma in &self.automorphisms {
            if path.iter().all(|&p| gamma[p] == p) {
                for (v, &g) in gamma.iter().enumerate() {
                    uf.union(v, g);
                }
            }
        }
        uf
    }
}

/// Ordered colour refinement to the coarsest equitable refinement.
///
/// Each vertex is keyed by its cell and its neighbour count in every cell;
/// cells split in key order, so the result depends only on the input order
/// of cells, never on vertex labels.
fn refine(adj: &[u64], cells: &mut Vec<Vec<usize>>) {
    loop {
        let masks: Vec<u64> = cells
            .iter()
            .map(|c| c.iter().fold(0u64, |m, &v| m | 1 << v))
            .collect();
        let mut next: Vec<Vec<usize>> = Vec::with_capacity(adj.len());
        for cell in cells.iter() {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut keyed: Vec<(Vec<u32>, usize)> = cell
                .iter()
                .map(|&v| (masks.iter().map(|m| (adj[v] & m).count_ones()).collect(), v))
                .collect();
            keyed.sort();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    next.push(keyed[start..i].iter().map(|(_, v)| *v).collect());
                    start = i;
                }
            }
        }
        let changed = next.len() != cells.len();
        *cells = next;
        if !changed {
            return;
        }
    }
}

fn encode(adj: &[u64], colors: &[u32], order: &[usize]) -> Vec<u64> {
    let n = order.len();
    let mut out = Vec::with_capacity(1 + n + n * n / 128 + 1);
    out.push(n as u64);
    out.extend(order.iter().map(|&v| u64::from(colors[v])));
    let mut word = 0u64;
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if adj[order[i]] >> order[j] & 1 == 1 {
                word |= 1 << (63 - bit);
            }
            bit += 1;
            if bit == 64 {
                out.push(word);
                word = 0;
                bit = 0;
            }
        }
    }
    if bit > 0 {
        out.push(word);
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
