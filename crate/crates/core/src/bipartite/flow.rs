//! Min-cost max-flow by successive shortest augmenting paths.
//!
//! Initial potentials come from Bellman-Ford, so arbitrary edge costs are
//! allowed as long as the network has no negative cycle. Later rounds run
//! Dijkstra on reduced costs.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: i64,
    cost: i64,
}

/// A directed network with integer capacities and costs.
#[derive(Debug, Clone, Default)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

/// Handle for reading the flow on an edge after solving.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeId(usize);

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self {
            arcs: Vec::new(),
            out: vec![Vec::new(); nodes],
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64, cost: i64) -> EdgeId {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap, cost });
        self.arcs.push(Arc {
            to: from,
            cap: 0,
            cost: -cost,
        });
        self.out[from].push(id);
        self.out[to].push(id + 1);
        EdgeId(id)
    }

    /// Flow currently on `edge`.
    pub fn flow(&self, edge: EdgeId) -> i64 {
        self.arcs[edge.0 ^ 1].cap
    }

    /// Pushes a maximum flow from `source` to `sink` at minimum cost; returns `(flow, cost)`.
    pub fn min_cost_max_flow(&mut self, source: usize, sink: usize) -> (i64, i64) {
        let n = self.out.len();
        let mut potential = self.bellman_ford(source);
        let (mut flow, mut cost) = (0i64, 0i64);
        loop {
            let mut dist = vec![i64::MAX; n];
            let mut via: Vec<Option<usize>> = vec![None; n];
            dist[source] = 0;
            let mut heap = BinaryHeap::new();
            heap.push(Reverse((0i64, source)));
            while let Some(Reverse((d, x))) = heap.pop() {
                if d > dist[x] {
                    continue;
                }
                for &a in &self.out[x] {
                    let arc = &self.arcs[a];
                    if arc.cap <= 0 || potential[arc.to] == i64::MAX {
                        continue;
                    }
                    let nd = d + arc.cost + potential[x] - potential[arc.to];
                    if nd < dist[arc.to] {
                        dist[arc.to] = nd;
                        via[arc.to] = Some(a);
                        heap.push(Reverse((nd, arc.to)));
                    }
                }
            }
            if dist[sink] == i64::MAX {
                return (flow, cost);
            }
            for x in 0..n {
                if dist[x] != i64::MAX && potential[x] != i64::MAX {
                    potential[x] += dist[x];
                }
            }
            let mut push = i64::MAX;
            let mut x = sink;
            while let Some(a) = via[x] {
                push = push.min(self.arcs[a].cap);
                x = self.arcs[a ^ 1].to;
            }
            let mut x = sink;
            while let Some(a) = via[x] {
                self.arcs[a].cap -= push;
                self.arcs[a ^ 1].cap += push;
                cost += push * self.arcs[a].cost;
                x = self.arcs[a ^ 1].to;
            }
            flow += push;
        }
    }

    fn bellman_ford(&self, source: usize) -> Vec<i64> {
        let n = self.out.len();
        let mut dist = vec![i64::MAX; n];
        dist[source] = 0;
        for _ in 0..n {
            let mut changed = false;
            for x in 0..n {
                if dist[x] == i64::MAX {
                    continue;
                }
                for &a in &self.out[x] {
                    let arc = &self.arcs[a];
                    if arc.cap > 0 && dist[x] + arc.cost < dist[arc.to] {
                        dist[arc.to] = dist[x] + arc.cost;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        dist
    }
}
