//! Minimum 1-trees, the penalty ascent for the Held-Karp lower bound, and
//! alpha-nearness values.
//!
//! All tree computations run on penalized costs `C(i,j) = d(i,j) + pi_i + pi_j`.
//! The 1-tree excludes one special city from a minimum spanning tree over the
//! others and then joins it by its two cheapest edges.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::instance::Instance;

/// Above this size the spanning tree is built over a nearest-neighbor graph.
pub const SPARSE_TREE_THRESHOLD: usize = 3_000;
const SPARSE_NEIGHBORS: usize = 20;

const MIN_STEP: f64 = 1e-4;

/// Per-city penalties `pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Penalties(Vec<f64>);

impl Penalties {
    pub fn zeros(n: usize) -> Self {
        Penalties(vec![0.0; n])
    }

    pub fn from_vec(pi: Vec<f64>) -> Self {
        assert!(pi.iter().all(|p| p.is_finite()), "penalties must be finite");
        Penalties(pi)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Penalized cost of edge `(i, j)`.
    #[inline]
    pub fn cost(&self, inst: &Instance, i: usize, j: usize) -> f64 {
        inst.dist(i, j) as f64 + self.0[i] + self.0[j]
    }
}

#[derive(Debug, Clone)]
pub struct OneTree {
    /// Spanning-tree edges followed by the two special-city edges.
    edges: Vec<(usize, usize)>,
    length: f64,
    degrees: Vec<u32>,
    bound: f64,
    special: usize,
    /// Special-city neighbors, cheaper first.
    special_links: [usize; 2],
}

impl OneTree {
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sum of penalized edge costs.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// `length - 2 * sum(pi)`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn special_node(&self) -> usize {
        self.special
    }

    pub fn special_links(&self) -> [usize; 2] {
        self.special_links
    }

    /// True when every city has degree 2, i.e. the 1-tree is a tour.
    pub fn is_tour(&self) -> bool {
        self.degrees.iter().all(|&d| d == 2)
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges
            .iter()
            .any(|&(a, b)| (a == i && b == j) || (a == j && b == i))
    }

    /// Tree edges without the special city, as an adjacency list.
    fn spanning_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.degrees.len()];
        for &(a, b) in &self.edges[..self.edges.len() - 2] {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem {
    key: f64,
    node: usize,
    from: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Reusable 1-tree builder. Holds the sparse neighbor graph for large instances.
pub struct OneTreeBuilder<'a> {
    inst: &'a Instance,
    neighbors: Option<Vec<Vec<usize>>>,
}

impl<'a> OneTreeBuilder<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        let neighbors = (inst.len() > SPARSE_TREE_THRESHOLD).then(|| nearest_graph(inst));
        OneTreeBuilder { inst, neighbors }
    }

    /// Always use the complete graph.
    pub fn dense(inst: &'a Instance) -> Self {
        OneTreeBuilder {
            inst,
            neighbors: None,
        }
    }

    pub fn build(&self, pi: &Penalties) -> OneTree {
        if let Some(adj) = &self.neighbors {
            if let Some(tree) = sparse_one_tree(self.inst, pi, adj) {
                return tree;
            }
        }
        dense_one_tree(self.inst, pi)
    }
}

/// Minimum 1-tree under penalized costs.
pub fn minimum_one_tree(inst: &Instance, pi: &Penalties) -> OneTree {
    OneTreeBuilder::new(inst).build(pi)
}

/// Two cheapest neighbors of `v` among `candidates`, ties to the lower index.
fn two_cheapest(
    inst: &Instance,
    pi: &Penalties,
    v: usize,
    candidates: impl Iterator<Item = usize>,
) -> Option<[(f64, usize); 2]> {
    let mut best = [(f64::INFINITY, usize::MAX); 2];
    for u in candidates {
        if u == v {
            continue;
        }
        let c = pi.cost(inst, v, u);
        if c < best[0].0 || (c == best[0].0 && u < best[0].1) {
            best[1] = best[0];
            best[0] = (c, u);
        } else if c < best[1].0 || (c == best[1].0 && u < best[1].1) {
            best[1] = (c, u);
        }
    }
    (best[1].1 != usize::MAX).then_some(best)
}

/// City whose second-cheapest incident edge is largest (lowest index on ties).
fn pick_special(
    n: usize,
    links: impl Fn(usize) -> Option<[(f64, usize); 2]>,
) -> Option<(usize, [(f64, usize); 2])> {
    let mut chosen: Option<(usize, [(f64, usize); 2])> = None;
    for v in 0..n {
        let pair = links(v)?;
        let better = match &chosen {
            None => true,
            Some((_, cur)) => pair[1].0 > cur[1].0,
        };
        if better {
            chosen = Some((v, pair));
        }
    }
    chosen
}

fn finish_tree(
    inst: &Instance,
    pi: &Penalties,
    mut edges: Vec<(usize, usize)>,
    mut length: f64,
    special: usize,
    links: [(f64, usize); 2],
) -> OneTree {
    let n = inst.len();
    for &(c, u) in &links {
        edges.push((special, u));
        length += c;
    }
    let mut degrees = vec![0u32; n];
    for &(a, b) in &edges {
        degrees[a] += 1;
        degrees[b] += 1;
    }
    let bound = length - 2.0 * pi.sum();
    OneTree {
        edges,
        length,
        degrees,
        bound,
        special,
        special_links: [links[0].1, links[1].1],
    }
}

fn dense_one_tree(inst: &Instance, pi: &Penalties) -> OneTree {
    let n = inst.len();
    let (special, links) = pick_special(n, |v| two_cheapest(inst, pi, v, 0..n))
        .expect("n >= 3 gives every city two neighbors");

    // Prim over V \ {special}.
    let start = if special == 0 { 1 } else { 0 };
    let mut in_tree = vec![false; n];
    let mut key = vec![f64::INFINITY; n];
    let mut from = vec![usize::MAX; n];
    in_tree[special] = true;
    in_tree[start] = true;
    for v in 0..n {
        if !in_tree[v] {
            key[v] = pi.cost(inst, start, v);
            from[v] = start;
        }
    }
    let mut edges = Vec::with_capacity(n);
    let mut length = 0.0;
    for _ in 0..n.saturating_sub(2) {
        let mut best = usize::MAX;
        let mut best_key = f64::INFINITY;
        for v in 0..n {
            if !in_tree[v] && (key[v] < best_key || best == usize::MAX) {
                best = v;
                best_key = key[v];
            }
        }
        in_tree[best] = true;
        edges.push((from[best], best));
        length += best_key;
        for v in 0..n {
            if !in_tree[v] {
                let c = pi.cost(inst, best, v);
                if c < key[v] {
                    key[v] = c;
                    from[v] = best;
                }
            }
        }
    }
    finish_tree(inst, pi, edges, length, special, links)
}

fn sparse_one_tree(inst: &Instance, pi: &Penalties, adj: &[Vec<usize>]) -> Option<OneTree> {
    let n = inst.len();
    let (special, links) =
        pick_special(n, |v| two_cheapest(inst, pi, v, adj[v].iter().copied()))?;
    let start = if special == 0 { 1 } else { 0 };
    let mut in_tree = vec![false; n];
    in_tree[special] = true;
    let mut heap = BinaryHeap::new();
    heap.push(HeapItem {
        key: 0.0,
        node: start,
        from: usize::MAX,
    });
    let mut edges = Vec::with_capacity(n);
    let mut length = 0.0;
    let mut added = 0;
    while let Some(item) = heap.pop() {
        if in_tree[item.node] {
            continue;
        }
        in_tree[item.node] = true;
        added += 1;
        if item.from != usize::MAX {
            edges.push((item.from, item.node));
            length += item.key;
        }
        for &u in &adj[item.node] {
            if !in_tree[u] {
                heap.push(HeapItem {
                    key: pi.cost(inst, item.node, u),
                    node: u,
                    from: item.node,
                });
            }
        }
    }
    (added == n - 1).then(|| finish_tree(inst, pi, edges, length, special, links))
}

/// Symmetric union of each city's nearest neighbors by plain distance.
fn nearest_graph(inst: &Instance) -> Vec<Vec<usize>> {
    let n = inst.len();
    let k = SPARSE_NEIGHBORS.min(n - 1);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut scratch: Vec<(i64, usize)> = Vec::with_capacity(n);
    for i in 0..n {
        scratch.clear();
        scratch.extend((0..n).filter(|&j| j != i).map(|j| (inst.dist(i, j), j)));
        scratch.select_nth_unstable(k - 1);
        for &(_, j) in &scratch[..k] {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// Result of the penalty ascent.
#[derive(Debug, Clone)]
pub struct Ascent {
    pub penalties: Penalties,
    /// Best lower bound seen.
    pub bound: f64,
    /// The 1-tree at the best penalties.
    pub tree: OneTree,
    pub iterations: usize,
}

/// Subgradient ascent on the 1-tree bound.
///
/// Step schedule: period starts at `max(n/2, 10)` with step 1. While the first
/// period keeps improving the step doubles; an improvement on the last iteration
/// of a period doubles the period (capped at the initial one). Each period ends by
/// halving both. Stops when the 1-tree is a tour, the period drops below 1 or the
/// step below 1e-4.
pub fn ascend_penalties(inst: &Instance) -> Ascent {
    ascend_with(&OneTreeBuilder::new(inst), inst)
}

pub fn ascend_with(builder: &OneTreeBuilder<'_>, inst: &Instance) -> Ascent {
    let n = inst.len();
    let mut pi = Penalties::zeros(n);
    let mut tree = builder.build(&pi);
    let mut best = Ascent {
        penalties: pi.clone(),
        bound: tree.bound(),
        tree: tree.clone(),
        iterations: 1,
    };
    if tree.is_tour() {
        return best;
    }

    let initial_period = (n / 2).max(10);
    let mut period = initial_period;
    let mut step = 1.0f64;
    let mut initial_phase = true;
    let mut last_v: Vec<f64> = subgradient(&tree);
    let mut iterations = 1;

    'outer: while period >= 1 && step >= MIN_STEP {
        let mut p = 1;
        while p <= period {
            let v = subgradient(&tree);
            {
                let pis = &mut pi.0;
                for i in 0..n {
                    pis[i] += step * (0.7 * v[i] + 0.3 * last_v[i]);
                }
            }
            last_v = v;
            tree = builder.build(&pi);
            iterations += 1;
            if tree.bound() > best.bound {
                best.bound = tree.bound();
                best.penalties = pi.clone();
                best.tree = tree.clone();
                if tree.is_tour() {
                    break 'outer;
                }
                if initial_phase {
                    step *= 2.0;
                }
                if p == period {
                    period = (period * 2).min(initial_period);
                }
            } else if initial_phase && p > period / 2 {
                initial_phase = false;
                p = 0;
                step *= 0.75;
            }
            p += 1;
        }
        period /= 2;
        step /= 2.0;
    }
    best.iterations = iterations;
    best
}

fn subgradient(tree: &OneTree) -> Vec<f64> {
    tree.degrees().iter().map(|&d| d as f64 - 2.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaEntry {
    pub to: usize,
    pub alpha: f64,
}

/// Per-city alpha values for a short list of the most promising edges.
#[derive(Debug, Clone)]
pub struct AlphaTable {
    rows: Vec<Vec<AlphaEntry>>,
}

impl AlphaTable {
    pub fn row(&self, i: usize) -> &[AlphaEntry] {
        &self.rows[i]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.rows[i].iter().find(|e| e.to == j).map(|e| e.alpha)
    }
}

/// Computes alpha rows one source city at a time via tree-path maxima.
pub struct AlphaCalculator<'a> {
    inst: &'a Instance,
    pi: &'a Penalties,
    tree: &'a OneTree,
    adj: Vec<Vec<usize>>,
    /// Penalized cost of the dearer special-city link.
    special_second: f64,
    path_max: Vec<f64>,
    stack: Vec<usize>,
    seen: Vec<bool>,
}

impl<'a> AlphaCalculator<'a> {
    pub fn new(inst: &'a Instance, tree: &'a OneTree, pi: &'a Penalties) -> Self {
        let n = inst.len();
        let s = tree.special_node();
        let [a, b] = tree.special_links();
        let special_second = pi.cost(inst, s, a).max(pi.cost(inst, s, b));
        AlphaCalculator {
            inst,
            pi,
            tree,
            adj: tree.spanning_adjacency(),
            special_second,
            path_max: vec![0.0; n],
            stack: Vec::with_capacity(n),
            seen: vec![false; n],
        }
    }

    /// Fills `out[j]` with alpha(i, j) for every `j`; `out[i]` is left at 0.
    pub fn row(&mut self, i: usize, out: &mut [f64]) {
        let n = self.inst.len();
        let s = self.tree.special_node();
        let links = self.tree.special_links();
        out[i] = 0.0;
        if i == s {
            for (j, o) in out.iter_mut().enumerate().take(n) {
                if j != s {
                    *o = if links.contains(&j) {
                        0.0
                    } else {
                        self.pi.cost(self.inst, s, j) - self.special_second
                    };
                }
            }
            return;
        }
        // Max penalized edge cost on the tree path from i to every other city.
        self.seen.iter_mut().for_each(|x| *x = false);
        self.seen[i] = true;
        self.path_max[i] = f64::NEG_INFINITY;
        self.stack.clear();
        self.stack.push(i);
        while let Some(u) = self.stack.pop() {
            for k in 0..self.adj[u].len() {
                let w = self.adj[u][k];
                if !self.seen[w] {
                    self.seen[w] = true;
                    let c = self.pi.cost(self.inst, u, w);
                    self.path_max[w] = self.path_max[u].max(c);
                    self.stack.push(w);
                }
            }
        }
        for (j, o) in out.iter_mut().enumerate().take(n) {
            if j == i {
                continue;
            }
            *o = if j == s {
                if links.contains(&i) {
                    0.0
                } else {
                    self.pi.cost(self.inst, i, s) - self.special_second
                }
            } else {
                self.pi.cost(self.inst, i, j) - self.path_max[j]
            };
        }
    }
}

/// Alpha values for every pair; intended for small instances.
pub fn alpha_matrix(inst: &Instance, tree: &OneTree, pi: &Penalties) -> Vec<Vec<f64>> {
    let n = inst.len();
    let mut calc = AlphaCalculator::new(inst, tree, pi);
    (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            calc.row(i, &mut row);
            row
        })
        .collect()
}

/// Keeps, for each city, the `k_near` edges with the smallest alpha (ties by
/// distance, then city index).
pub fn alpha_values(inst: &Instance, tree: &OneTree, pi: &Penalties, k_near: usize) -> AlphaTable {
    let n = inst.len();
    let k = k_near.min(n - 1);
    let mut calc = AlphaCalculator::new(inst, tree, pi);
    let mut row = vec![0.0; n];
    let mut scratch: Vec<(f64, i64, usize)> = Vec::with_capacity(n);
    let cmp = |a: &(f64, i64, usize), b: &(f64, i64, usize)| {
        a.0.total_cmp(&b.0)
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    };
    let rows = (0..n)
        .map(|i| {
            calc.row(i, &mut row);
            scratch.clear();
            scratch.extend(
                (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (row[j], inst.dist(i, j), j)),
            );
            if k < scratch.len() {
                scratch.select_nth_unstable_by(k, cmp);
                scratch.truncate(k);
            }
            scratch.sort_by(cmp);
            scratch
                .iter()
                .map(|&(alpha, _, to)| AlphaEntry { to, alpha })
                .collect()
        })
        .collect();
    AlphaTable { rows }
}
