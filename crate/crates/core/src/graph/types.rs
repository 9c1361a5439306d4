use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest vertex count a [`Graph`] supports (one adjacency word per vertex).
pub const MAX_VERTICES: usize = 64;

/// A finite simple undirected graph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Graph {
    n: usize,
    adj: Vec<u64>,
}

impl Graph {
    pub fn empty(n: usize) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::TooLarge {
                what: "vertex count",
                max: MAX_VERTICES,
                got: n,
            });
        }
        Ok(Self { n, adj: vec![0; n] })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::Config(format!(
                    "invalid edge ({a}, {b}) for {n} vertices"
                )));
            }
            g.add_edge(a, b);
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Adjacency rows as bitmasks.
    pub fn adjacency(&self) -> &[u64] {
        &self.adj
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] >> b & 1 == 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        debug_assert!(a != b);
        self.adj[a] |= 1 << b;
        self.adj[b] |= 1 << a;
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        self.adj[a] &= !(1 << b);
        self.adj[b] &= !(1 << a);
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let mut w = self.adj[v];
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(b)
        })
    }

    /// Edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|a| {
                self.neighbors(a)
                    .filter(move |&b| b > a)
                    .map(move |b| (a, b))
            })
            .collect()
    }

    /// `G - v`, keeping the relative order of the remaining vertices.
    pub fn delete_vertex(&self, v: usize) -> Graph {
        let keep: Vec<usize> = (0..self.n).filter(|&x| x != v).collect();
        self.induced(&keep)
    }

    /// Subgraph induced by `keep`, relabelled to `0..keep.len()` in that order.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut g = Graph {
            n: keep.len(),
            adj: vec![0; keep.len()],
        };
        for (i, &a) in keep.iter().enumerate() {
            for (j, &b) in keep.iter().enumerate().skip(i + 1) {
                if self.has_edge(a, b) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Graph {
        debug_assert_eq!(perm.len(), self.n);
        let mut g = Graph {
            n: self.n,
            adj: vec![0; self.n],
        };
        for (a, b) in self.edges() {
            g.add_edge(perm[a], perm[b]);
        }
        g
    }

    /// This graph plus a new last vertex adjacent to `neighbors`.
    pub fn with_new_vertex(&self, neighbors: &[usize]) -> Result<Graph> {
        let mut g = Graph::empty(self.n + 1)?;
        g.adj[..self.n].copy_from_slice(&self.adj);
        for &x in neighbors {
            g.add_edge(self.n, x);
        }
        Ok(g)
    }

    pub fn triangle_count(&self) -> usize {
        let mut t = 0;
        for a in 0..self.n {
            for b in self.neighbors(a).filter(|&b| b > a) {
                let above = if b + 1 >= 64 { 0 } else { !0u64 << (b + 1) };
                t += (self.adj[a] & self.adj[b] & above).count_ones() as usize;
            }
        }
        t
    }

    /// Number of edges with both ends in `set`.
    pub fn edges_within(&self, set: &[usize]) -> usize {
        let mask = set.iter().fold(0u64, |m, &v| m | 1 << v);
        set.iter()
            .map(|&v| (self.adj[v] & mask).count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let full = if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        };
        let mut seen = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = self.adj[v] & !seen;
            seen |= new;
            frontier |= new;
        }
        seen == full
    }

    /// Connected, at least three vertices, and no articulation point.
    pub fn is_biconnected(&self) -> bool {
        self.n >= 3 && self.is_connected() && articulation_points(self).is_empty()
    }

    /// Graph with vertices relabelled uniformly at random.
    pub fn scrambled<R: Rng + ?Sized>(&self, rng: &mut R) -> Graph {
        let mut perm: Vec<usize> = (0..self.n).collect();
        perm.shuffle(rng);
        self.permute(&perm)
    }
}

/// Articulation points by iterative depth-first search with low-links.
pub fn articulation_points(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut is_cut = vec![false; n];
    let mut timer = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        let mut root_children = 0;
        // (vertex, parent, remaining neighbours)
        let mut stack: Vec<(usize, usize, u64)> = vec![(root, usize::MAX, g.adj[root])];
        while let Some(top) = stack.last_mut() {
            let (v, parent) = (top.0, top.1);
            if top.2 == 0 {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if p != root && low[v] >= disc[p] {
                        is_cut[p] = true;
                    }
                }
                continue;
            }
            let w = top.2.trailing_zeros() as usize;
            top.2 &= top.2 - 1;
            if w == parent {
                continue;
            }
            if disc[w] == usize::MAX {
                disc[w] = timer;
                low[w] = timer;
                timer += 1;
                if v == root {
                    root_children += 1;
                }
                stack.push((w, v, g.adj[w]));
            } else {
                low[v] = low[v].min(disc[w]);
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }
    (0..n).filter(|&v| is_cut[v]).collect()
}

#[derive(Serialize, Deserialize)]
struct GraphForm {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Serialize for Graph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphForm {
            n: self.n,
            edges: self.edges(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = GraphForm::deserialize(d)?;
        Graph::from_edges(f.n, &f.edges).map_err(serde::de::Error::custom)
    }
}

/// Which side of a bipartition a vertex lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Row,
    Column,
}

/// A bipartite graph with parts `U` (rows) and `V` (columns), as a 0/1 matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BipartiteIncidence {
    rows: usize,
    cols: usize,
    cells: Vec<u8>,
}

impl BipartiteIncidence {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            cells: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            for (j, &x) in r.iter().enumerate() {
                if x > 1 {
                    return Err(Error::Config(format!("incidence entry {x} is not 0/1")));
                }
                m.set(i, j, x == 1);
            }
        }
        Ok(m)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.cells[r * self.cols + c] == 1
    }

    pub fn set(&mut self, r: usize, c: usize, on: bool) {
        self.cells[r * self.cols + c] = on as u8;
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.cells
            .chunks(self.cols.max(1))
            .take(self.rows)
            .map(<[u8]>::to_vec)
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.cells.iter().map(|&x| x as usize).sum()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        (0..self.rows)
            .map(|r| (0..self.cols).filter(|&c| self.get(r, c)).count())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        (0..self.cols)
            .map(|c| (0..self.rows).filter(|&r| self.get(r, c)).count())
            .collect()
    }

    pub fn delete_row(&self, r: usize) -> Self {
        let keep: Vec<usize> = (0..self.rows).filter(|&x| x != r).collect();
        self.select(&keep, &(0..self.cols).collect::<Vec<_>>())
    }

    pub fn delete_col(&self, c: usize) -> Self {
        let keep: Vec<usize> = (0..self.cols).filter(|&x| x != c).collect();
        self.select(&(0..self.rows).collect::<Vec<_>>(), &keep)
    }

    fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut m = Self::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                m.set(i, j, self.get(r, c));
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(c, r, self.get(r, c));
            }
        }
        m
    }

    /// Moves row `r` to `row_perm[r]` and column `c` to `col_perm[c]`.
    pub fn permute(&self, row_perm: &[usize], col_perm: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(row_perm[r], col_perm[c], self.get(r, c));
            }
        }
        m
    }

    /// Rows and columns relabelled independently at random.
    pub fn scrambled<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        let mut rp: Vec<usize> = (0..self.rows).collect();
        let mut cp: Vec<usize> = (0..self.cols).collect();
        rp.shuffle(rng);
        cp.shuffle(rng);
        self.permute(&rp, &cp)
    }

    /// The underlying graph: rows are `0..u`, columns `u..u+v`.
    pub fn to_graph(&self) -> Result<Graph> {
        let mut g = Graph::empty(self.rows + self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    g.add_edge(r, self.rows + c);
                }
            }
        }
        Ok(g)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixForm {
    rows: usize,
    cols: usize,
    matrix: Vec<Vec<u8>>,
}

impl Serialize for BipartiteIncidence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixForm {
            rows: self.rows,
            cols: self.cols,
            matrix: self.to_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BipartiteIncidence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = MatrixForm::deserialize(d)?;
        if f.matrix.len() != f.rows {
            return Err(serde::de::Error::custom(format!(
                "expected {} rows, found {}",
                f.rows,
                f.matrix.len()
            )));
        }
        let mut m = BipartiteIncidence::zeros(f.rows, f.cols);
        for (r, row) in f.matrix.iter().enumerate() {
            if row.len() != f.cols {
                return Err(serde::de::Error::custom(format!(
                    "row {r} has {} entries, expected {}",
                    row.len(),
                    f.cols
                )));
            }
            for (c, &x) in row.iter().enumerate() {
                if x > 1 {
                    return Err(serde::de::Error::custom(format!(
                        "incidence entry {x} is not 0/1"
                    )));
                }
                m.set(r, c, x == 1);
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deletion_preserves_order() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let h = g.delete_vertex(1);
        assert_eq!(h.edges(), vec![(0, 2), (1, 2)]);
    }

    #[test]
    fn triangles_and_cuts() {
        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(k4.triangle_count(), 4);
        assert!(k4.is_biconnected());
        let bowtie =
            Graph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]).unwrap();
        assert_eq!(articulation_points(&bowtie), vec![2]);
        assert!(!bowtie.is_biconnected());
        let path = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(articulation_points(&path), vec![1, 2]);
        assert!(!Graph::from_edges(4, &[(0, 1), (2, 3)])
            .unwrap()
            .is_connected());
    }

    #[test]
    fn matrix_serde_round_trip() {
        let m = BipartiteIncidence::from_rows(&[vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<BipartiteIncidence>(&s).unwrap(), m);
        assert_eq!(m.delete_col(2).to_rows(), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(m.row_sums(), vec![2, 2]);
        assert_eq!(m.col_sums(), vec![1, 1, 2]);
    }
}
