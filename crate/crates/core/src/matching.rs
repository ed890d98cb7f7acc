//! Min-cost flow and maximum-weight bipartite b-matching.
//!
//! The b-matching is solved by the usual reduction: source to each left
//! vertex with capacity `b(i)`, left to right with capacity `min(b(i), b(j))`
//! and cost `-w`, right to sink with capacity `b(j)`. Successive shortest
//! paths with Johnson potentials augment while the cheapest path has
//! negative cost, which yields a maximum-weight (not maximum-cardinality)
//! b-matching.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use thiserror::Error;

/// Reduced costs within this of zero are treated as zero.
pub const COST_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("supplies do not balance (net {0})")]
    Unbalanced(i64),
    #[error("only {routed} of {required} units of supply can be routed")]
    Infeasible { routed: i64, required: i64 },
    #[error("network has a negative-cost cycle")]
    NegativeCycle,
    #[error("arc endpoint {0} out of range")]
    NodeOutOfRange(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("vertex capacity must be at least 1")]
    ZeroCapacity,
    #[error("edge ({0}, {1}) references a missing vertex")]
    MissingVertex(usize, usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge weight must be positive and finite, got {0}")]
    BadWeight(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub capacity: i64,
    pub cost: f64,
}

#[derive(Debug, Clone, Default)]
pub struct FlowNetwork {
    pub node_count: usize,
    pub arcs: Vec<Arc>,
}

impl FlowNetwork {
    pub fn new(node_count: usize) -> Self {
        Self {
            node_count,
            arcs: Vec::new(),
        }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, capacity: i64, cost: f64) -> usize {
        self.arcs.push(Arc {
            from,
            to,
            capacity,
            cost,
        });
        self.arcs.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Flow {
    /// Flow on each arc, indexed like `FlowNetwork::arcs`.
    pub arc_flows: Vec<i64>,
    pub cost: f64,
}

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: i64,
    cost: f64,
    rev: usize,
}

/// Residual graph driven by successive shortest augmenting paths.
struct Residual {
    adj: Vec<Vec<Edge>>,
    potential: Vec<f64>,
    /// (node, index in adj[node]) of each original arc
    arc_pos: Vec<(usize, usize)>,
}

#[derive(PartialEq)]
struct Label(f64, usize);

impl Eq for Label {}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Label {
    // min-heap on distance, then node index
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl Residual {
    fn new(node_count: usize) -> Self {
        Self {
            adj: vec![Vec::new(); node_count],
            potential: vec![0.0; node_count],
            arc_pos: Vec::new(),
        }
    }

    fn add(&mut self, from: usize, to: usize, cap: i64, cost: f64) {
        let rev_from = self.adj[to].len() + usize::from(from == to);
        let rev_to = self.adj[from].len();
        self.arc_pos.push((from, rev_to));
        self.adj[from].push(Edge {
            to,
            cap,
            cost,
            rev: rev_from,
        });
        self.adj[to].push(Edge {
            to: from,
            cap: 0,
            cost: -cost,
            rev: rev_to,
        });
    }

    /// Bellman-Ford from a virtual root joined to every node; sets initial
    /// potentials and rejects negative cycles anywhere in the residual graph.
    fn init_potentials(&mut self) -> Result<(), FlowError> {
        let n = self.adj.len();
        let mut dist = vec![0.0; n];
        for round in 0..=n {
            let mut changed = false;
            for u in 0..n {
                for e in &self.adj[u] {
                    if e.cap > 0 && dist[u] + e.cost < dist[e.to] - COST_EPS {
                        dist[e.to] = dist[u] + e.cost;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
            if round == n {
                return Err(FlowError::NegativeCycle);
            }
        }
        self.potential = dist;
        Ok(())
    }

    /// Dijkstra on reduced costs. Returns true distances and the parent edge of each node.
    fn shortest_paths(&self, source: usize) -> (Vec<f64>, Vec<Option<(usize, usize)>>) {
        let n = self.adj.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut parent = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Label(0.0, source));
        while let Some(Label(d, u)) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            for (k, e) in self.adj[u].iter().enumerate() {
                if e.cap <= 0 || done[e.to] {
                    continue;
                }
                let reduced = (e.cost + self.potential[u] - self.potential[e.to]).max(0.0);
                let nd = d + reduced;
                if nd < dist[e.to] - COST_EPS {
                    dist[e.to] = nd;
                    parent[e.to] = Some((u, k));
                    heap.push(Label(nd, e.to));
                }
            }
        }
        // convert reduced distances back to real path costs
        let real = dist
            .iter()
            .enumerate()
            .map(|(v, d)| d + self.potential[v] - self.potential[source])
            .collect();
        (real, parent)
    }

    /// Augments from `s` to `t` until `limit` units are sent, no path remains,
    /// or (if `only_negative`) the cheapest path stops being negative.
    fn augment(&mut self, s: usize, t: usize, limit: i64, only_negative: bool) -> (i64, f64) {
        let mut sent = 0;
        let mut cost = 0.0;
        while sent < limit {
            let (dist, parent) = self.shortest_paths(s);
            if dist[t].is_infinite() {
                break;
            }
            if only_negative && dist[t] >= -COST_EPS {
                break;
            }
            for (p, d) in self.potential.iter_mut().zip(&dist) {
                if d.is_finite() {
                    *p = *d;
                }
            }
            let mut push = limit - sent;
            let mut v = t;
            while let Some((u, k)) = parent[v] {
                push = push.min(self.adj[u][k].cap);
                v = u;
            }
            let mut v = t;
            while let Some((u, k)) = parent[v] {
                self.adj[u][k].cap -= push;
                let rev = self.adj[u][k].rev;
                self.adj[v][rev].cap += push;
                v = u;
            }
            sent += push;
            cost += push as f64 * dist[t];
        }
        (sent, cost)
    }

    fn arc_flows(&self, capacities: impl Iterator<Item = i64>) -> Vec<i64> {
        self.arc_pos
            .iter()
            .zip(capacities)
            .map(|(&(u, k), cap)| cap - self.adj[u][k].cap)
            .collect()
    }
}

/// Minimum-cost flow meeting `supplies` exactly (positive = source, negative = sink).
pub fn min_cost_flow(network: &FlowNetwork, supplies: &[i64]) -> Result<Flow, FlowError> {
    let n = network.node_count;
    if supplies.len() != n {
        return Err(FlowError::NodeOutOfRange(supplies.len()));
    }
    let net: i64 = supplies.iter().sum();
    if net != 0 {
        return Err(FlowError::Unbalanced(net));
    }
    let (s, t) = (n, n + 1);
    let mut res = Residual::new(n + 2);
    for a in &network.arcs {
        if a.from >= n || a.to >= n {
            return Err(FlowError::NodeOutOfRange(a.from.max(a.to)));
        }
        res.add(a.from, a.to, a.capacity, a.cost);
    }
    let mut required = 0;
    for (v, &b) in supplies.iter().enumerate() {
        if b > 0 {
            res.add(s, v, b, 0.0);
            required += b;
        } else if b < 0 {
            res.add(v, t, -b, 0.0);
        }
    }
    res.init_potentials()?;
    let (routed, _) = res.augment(s, t, required, false);
    if routed < required {
        return Err(FlowError::Infeasible { routed, required });
    }
    let arc_flows = res.arc_flows(network.arcs.iter().map(|a| a.capacity));
    let arc_flows = arc_flows[..network.arcs.len()].to_vec();
    let cost = network
        .arcs
        .iter()
        .zip(&arc_flows)
        .map(|(a, &f)| a.cost * f as f64)
        .sum();
    Ok(Flow { arc_flows, cost })
}

/// Bipartite graph with vertex capacities and positive edge weights.
#[derive(Debug, Clone, Default)]
pub struct CapacitatedBipartiteGraph {
    left: Vec<u32>,
    right: Vec<u32>,
    edges: Vec<(usize, usize, f64)>,
    seen: BTreeSet<(usize, usize)>,
}

impl CapacitatedBipartiteGraph {
    pub fn new(left_capacities: Vec<u32>, right_capacities: Vec<u32>) -> Result<Self, GraphError> {
        if left_capacities.iter().chain(&right_capacities).any(|&b| b == 0) {
            return Err(GraphError::ZeroCapacity);
        }
        Ok(Self {
            left: left_capacities,
            right: right_capacities,
            ..Default::default()
        })
    }

    pub fn add_edge(&mut self, i: usize, j: usize, weight: f64) -> Result<(), GraphError> {
        if i >= self.left.len() || j >= self.right.len() {
            return Err(GraphError::MissingVertex(i, j));
        }
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(GraphError::BadWeight(weight));
        }
        if !self.seen.insert((i, j)) {
            return Err(GraphError::DuplicateEdge(i, j));
        }
        self.edges.push((i, j, weight));
        Ok(())
    }

    pub fn left_capacities(&self) -> &[u32] {
        &self.left
    }

    pub fn right_capacities(&self) -> &[u32] {
        &self.right
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BMatching {
    /// Nonzero multiplicities `(left, right, m)`, sorted by `(left, right)`.
    pub multiplicities: Vec<(usize, usize, u32)>,
    pub total_weight: f64,
}

pub fn max_weight_b_matching(g: &CapacitatedBipartiteGraph) -> BMatching {
    if g.edges.is_empty() {
        return BMatching::default();
    }
    let nl = g.left.len();
    let nr = g.right.len();
    let (s, t) = (nl + nr, nl + nr + 1);
    let mut res = Residual::new(nl + nr + 2);

    let mut edges = g.edges.clone();
    edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    for &(i, j, w) in &edges {
        let cap = g.left[i].min(g.right[j]);
        res.add(i, nl + j, i64::from(cap), -w);
    }
    for (i, &b) in g.left.iter().enumerate() {
        res.add(s, i, i64::from(b), 0.0);
    }
    for (j, &b) in g.right.iter().enumerate() {
        res.add(nl + j, t, i64::from(b), 0.0);
    }
    // costs are only negative on left->right arcs, the network is acyclic
    res.init_potentials().expect("bipartite network is acyclic");
    let limit: i64 = g.left.iter().map(|&b| i64::from(b)).sum();
    res.augment(s, t, limit, true);

    let flows = res.arc_flows(edges.iter().map(|&(i, j, _)| i64::from(g.left[i].min(g.right[j]))));
    let mut out = BMatching::default();
    for (&(i, j, w), &f) in edges.iter().zip(&flows) {
        if f > 0 {
            out.multiplicities.push((i, j, f as u32));
            out.total_weight += w * f as f64;
        }
    }
    out
}
