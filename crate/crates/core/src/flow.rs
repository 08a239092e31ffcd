//! Real-capacity flow networks: Dinic max-flow and successive-shortest-path
//! min-cost flow, plus residual reachability for cut extraction.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, VecDeque};

/// Residual capacities at or below this are treated as saturated.
pub const FLOW_EPS: f64 = 1e-12;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: f64,
    flow: f64,
    cost: f64,
}

impl Arc {
    fn residual(&self) -> f64 {
        self.cap - self.flow
    }
}

/// Directed network; arc `2k` is the k-th added arc and `2k + 1` its reverse.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self { arcs: Vec::new(), adj: vec![Vec::new(); nodes] }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Adds `u -> v`; `cap` may be `f64::INFINITY`. Returns the arc id.
    pub fn add_arc(&mut self, u: usize, v: usize, cap: f64, cost: f64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to: v, cap, flow: 0.0, cost });
        self.arcs.push(Arc { to: u, cap: 0.0, flow: 0.0, cost: -cost });
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
        id
    }

    pub fn flow(&self, arc: usize) -> f64 {
        self.arcs[arc].flow
    }

    fn push(&mut self, arc: usize, amount: f64) {
        self.arcs[arc].flow += amount;
        self.arcs[arc ^ 1].flow -= amount;
    }

    fn levels(&self, s: usize) -> Vec<Option<usize>> {
        let mut level = vec![None; self.node_count()];
        level[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if arc.residual() > FLOW_EPS && level[arc.to].is_none() {
                    level[arc.to] = Some(level[u].unwrap() + 1);
                    queue.push_back(arc.to);
                }
            }
        }
        level
    }

    fn blocking(&mut self, u: usize, t: usize, limit: f64, level: &[Option<usize>], it: &mut [usize]) -> f64 {
        if u == t {
            return limit;
        }
        while it[u] < self.adj[u].len() {
            let a = self.adj[u][it[u]];
            let (to, res) = (self.arcs[a].to, self.arcs[a].residual());
            if res > FLOW_EPS && level[to] == level[u].map(|l| l + 1) {
                let pushed = self.blocking(to, t, limit.min(res), level, it);
                if pushed > FLOW_EPS {
                    self.push(a, pushed);
                    return pushed;
                }
            }
            it[u] += 1;
        }
        0.0
    }

    /// Dinic's algorithm; returns the flow value added.
    pub fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        loop {
            let level = self.levels(s);
            if level[t].is_none() {
                return total;
            }
            let mut it = vec![0usize; self.node_count()];
            loop {
                let pushed = self.blocking(s, t, f64::INFINITY, &level, &mut it);
                if pushed <= FLOW_EPS {
                    break;
                }
                total += pushed;
            }
        }
    }

    /// Nodes reachable from `sources` through arcs with residual capacity.
    pub fn residual_reachable(&self, sources: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut stack: Vec<usize> = sources.to_vec();
        for &s in sources {
            seen[s] = true;
        }
        while let Some(u) = stack.pop() {
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if arc.residual() > FLOW_EPS && !seen[arc.to] {
                    seen[arc.to] = true;
                    stack.push(arc.to);
                }
            }
        }
        seen
    }

    /// Bellman-Ford over residual arcs, used once to seed the potentials
    /// (costs may be negative).
    fn initial_potentials(&self, s: usize) -> Vec<f64> {
        let n = self.node_count();
        let mut dist = vec![f64::INFINITY; n];
        dist[s] = 0.0;
        for _ in 0..n {
            let mut changed = false;
            for u in 0..n {
                if dist[u] == f64::INFINITY {
                    continue;
                }
                for &a in &self.adj[u] {
                    let arc = &self.arcs[a];
                    if arc.residual() > FLOW_EPS && dist[u] + arc.cost < dist[arc.to] {
                        dist[arc.to] = dist[u] + arc.cost;
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

    /// Successive shortest paths from `s` to `t` until `amount` is routed or
    /// no augmenting path remains. Returns `(flow, cost)`.
    pub fn min_cost_flow(&mut self, s: usize, t: usize, amount: f64) -> (f64, f64) {
        let n = self.node_count();
        let mut pot = self.initial_potentials(s);
        for p in pot.iter_mut() {
            if *p == f64::INFINITY {
                *p = 0.0;
            }
        }
        let mut routed = 0.0;
        let mut cost = 0.0;
        while amount - routed > FLOW_EPS {
            let mut dist = vec![f64::INFINITY; n];
            let mut prev: Vec<Option<usize>> = vec![None; n];
            dist[s] = 0.0;
            let mut heap = BinaryHeap::from([Reverse((Key(0.0), s))]);
            while let Some(Reverse((Key(d), u))) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for &a in &self.adj[u] {
                    let arc = &self.arcs[a];
                    if arc.residual() <= FLOW_EPS {
                        continue;
                    }
                    // reduced costs are >= 0 up to round-off
                    let reduced = (arc.cost + pot[u] - pot[arc.to]).max(0.0);
                    let nd = d + reduced;
                    if nd < dist[arc.to] {
                        dist[arc.to] = nd;
                        prev[arc.to] = Some(a);
                        heap.push(Reverse((Key(nd), arc.to)));
                    }
                }
            }
            if dist[t] == f64::INFINITY {
                break;
            }
            for v in 0..n {
                if dist[v] < f64::INFINITY {
                    pot[v] += dist[v];
                }
            }
            let mut bottleneck = amount - routed;
            let mut v = t;
            while let Some(a) = prev[v] {
                bottleneck = bottleneck.min(self.arcs[a].residual());
                v = self.arcs[a ^ 1].to;
            }
            let mut v = t;
            while let Some(a) = prev[v] {
                self.push(a, bottleneck);
                cost += bottleneck * self.arcs[a].cost;
                v = self.arcs[a ^ 1].to;
            }
            routed += bottleneck;
        }
        (routed, cost)
    }
}
