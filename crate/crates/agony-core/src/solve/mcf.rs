//! Exact d = 1 agony minimization via min-cost-flow duality.
//!
//! Minimizing `A_1 = sum max(0, r(u) - r(v) + 1)` over integer rankings is
//! a linear program: `min sum z_uv` subject to `z_uv >= r(u) - r(v) + 1`,
//! `z >= 0`, with `r` free. Its LP dual is a maximum circulation with unit
//! capacities, so `A_1*` equals the largest number of edges carried by a
//! circulation. Substituting `y = 1 - w` for the circulation weights turns
//! that into a minimum-cost flow on the original arcs (capacity 1, cost 1)
//! where each node must export its degree imbalance
//! `b(w) = outdeg(w) - indeg(w)`: `A_1* = m - mincost`. The constraint
//! matrix is totally unimodular, so the integral optimum is the true
//! optimum over rankings.
//!
//! The flow is solved by successive shortest paths with node potentials
//! (Dijkstra on reduced costs, one blocking-flow augmentation per distance
//! class). At optimality the potentials themselves satisfy complementary
//! slackness — `y < 1` forces `pi(v) <= pi(u) + 1` and `y > 0` forces
//! `pi(v) >= pi(u) + 1` — which makes the shifted potentials an optimal
//! ranking directly.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::graph::DirectedGraph;

const INF: i64 = i64::MAX / 4;

#[derive(Debug, Clone)]
struct Arc {
    to: u32,
    /// Index of the reverse arc in `adj[to]`.
    rev: u32,
    cap: u32,
    cost: i64,
}

pub(super) struct D1Solution {
    /// Optimal ranks, 1-based, one per node.
    pub ranks: Vec<u32>,
    /// The exact minimum agony `A_1*`.
    pub agony: u64,
}

fn add_arc(adj: &mut [Vec<Arc>], u: usize, v: usize, cap: u32, cost: i64) -> (usize, usize) {
    let pu = adj[u].len();
    let pv = adj[v].len();
    adj[u].push(Arc { to: v as u32, rev: pv as u32, cap, cost });
    adj[v].push(Arc { to: u as u32, rev: pu as u32, cap: 0, cost: -cost });
    (u, pu)
}

/// Computes an optimal d = 1 ranking and the exact minimum agony.
pub(super) fn solve_d1(g: &DirectedGraph) -> D1Solution {
    let n = g.node_count();
    let m = g.edge_count();
    if m == 0 {
        return D1Solution { ranks: alloc::vec![1u32; n], agony: 0 };
    }
    let (source, sink) = (n, n + 1);
    let mut adj: Vec<Vec<Arc>> = alloc::vec![Vec::new(); n + 2];
    let mut edge_arcs: Vec<(usize, usize)> = Vec::with_capacity(m);
    for &(u, v) in g.edges() {
        edge_arcs.push(add_arc(&mut adj, u as usize, v as usize, 1, 1));
    }
    let mut total_supply = 0u64;
    for w in 0..n {
        let imbalance = g.out_degree(w as u32) as i64 - g.in_degree(w as u32) as i64;
        if imbalance > 0 {
            add_arc(&mut adj, source, w, imbalance as u32, 0);
            total_supply += imbalance as u64;
        } else if imbalance < 0 {
            add_arc(&mut adj, w, sink, (-imbalance) as u32, 0);
        }
    }

    let mut pi = alloc::vec![0i64; n + 2];
    let mut dist = alloc::vec![INF; n + 2];
    let mut level = alloc::vec![u32::MAX; n + 2];
    let mut iter = alloc::vec![0usize; n + 2];
    let mut heap: BinaryHeap<Reverse<(i64, usize)>> = BinaryHeap::new();
    let mut queue: Vec<usize> = Vec::with_capacity(n + 2);
    let mut shipped = 0u64;
    while shipped < total_supply {
        // Dijkstra over the residual graph with reduced costs
        // cost + pi(u) - pi(v) (non-negative by the potential invariant).
        dist.iter_mut().for_each(|d| *d = INF);
        dist[source] = 0;
        heap.clear();
        heap.push(Reverse((0, source)));
        while let Some(Reverse((du, u))) = heap.pop() {
            if du > dist[u] {
                continue;
            }
            for arc in &adj[u] {
                if arc.cap == 0 {
                    continue;
                }
                let v = arc.to as usize;
                let reduced = arc.cost + pi[u] - pi[v];
                debug_assert!(reduced >= 0);
                let nd = du + reduced;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        let dist_sink = dist[sink];
        debug_assert!(dist_sink < INF, "the flow problem is always feasible");
        // Capping at dist_sink keeps unreachable nodes' potentials valid.
        for v in 0..n + 2 {
            pi[v] += dist[v].min(dist_sink);
        }
        shipped += blocking_flow(&mut adj, &pi, source, sink, &mut level, &mut iter, &mut queue);
    }

    let min_pi = (0..n).map(|v| pi[v]).min().unwrap_or(0);
    let ranks: Vec<u32> = (0..n).map(|v| (pi[v] - min_pi + 1) as u32).collect();
    let cost: u64 = edge_arcs.iter().map(|&(u, i)| (1 - adj[u][i].cap) as u64).sum();
    D1Solution { ranks, agony: m as u64 - cost }
}

/// Ships as much flow as possible along admissible (zero-reduced-cost)
/// residual arcs: BFS levels, then Dinic-style blocking flow.
fn blocking_flow(
    adj: &mut [Vec<Arc>],
    pi: &[i64],
    source: usize,
    sink: usize,
    level: &mut [u32],
    iter: &mut [usize],
    queue: &mut Vec<usize>,
) -> u64 {
    level.iter_mut().for_each(|l| *l = u32::MAX);
    level[source] = 0;
    queue.clear();
    queue.push(source);
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        for arc in adj[u].iter() {
            let v = arc.to as usize;
            if arc.cap > 0 && level[v] == u32::MAX && arc.cost + pi[u] - pi[v] == 0 {
                level[v] = level[u] + 1;
                queue.push(v);
            }
        }
    }
    if level[sink] == u32::MAX {
        return 0;
    }
    iter.iter_mut().for_each(|i| *i = 0);
    let mut total = 0u64;
    loop {
        let pushed = augment(adj, pi, level, iter, source, sink, u32::MAX);
        if pushed == 0 {
            break;
        }
        total += pushed as u64;
    }
    total
}

fn augment(
    adj: &mut [Vec<Arc>],
    pi: &[i64],
    level: &[u32],
    iter: &mut [usize],
    u: usize,
    sink: usize,
    limit: u32,
) -> u32 {
    if u == sink {
        return limit;
    }
    while iter[u] < adj[u].len() {
        let (to, rev, cap, cost) = {
            let a = &adj[u][iter[u]];
            (a.to as usize, a.rev as usize, a.cap, a.cost)
        };
        if cap > 0 && level[to] == level[u] + 1 && cost + pi[u] - pi[to] == 0 {
            let pushed = augment(adj, pi, level, iter, to, sink, limit.min(cap));
            if pushed > 0 {
                adj[u][iter[u]].cap -= pushed;
                adj[to][rev].cap += pushed;
                return pushed;
            }
        }
        iter[u] += 1;
    }
    0
}
