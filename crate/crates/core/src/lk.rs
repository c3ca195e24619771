//! Sequential k-opt local search.
//!
//! A move is described by cities `t[0..2k]`: removed tour edges
//! `(t[2i], t[2i+1])`, added edges `(t[2i+1], t[2i+2])` and the closing edge
//! `(t[2k-1], t[0])`. Added edges come from candidate lists, tried in their
//! current order. Cumulative gain must stay positive, and the move must close
//! into a single tour after every removed edge.

use std::collections::VecDeque;

use crate::candidate::CandidateSets;
use crate::instance::Instance;
use crate::tour::Tour;

/// Default maximum move depth.
pub const DEFAULT_K_MAX: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KOptMove {
    /// `2k` cities, see the module docs.
    pub t: Vec<usize>,
    /// Length decrease; always positive for moves returned by the search.
    pub gain: i64,
}

impl KOptMove {
    pub fn k(&self) -> usize {
        self.t.len() / 2
    }
}

#[inline]
fn partner(slot: usize, len: usize) -> usize {
    if slot % 2 == 1 {
        (slot + 1) % len
    } else {
        (slot + len - 1) % len
    }
}

/// Segment layout of a move: for every slot, the slot at the other end of its
/// segment, and whether the segment is walked forward from that slot.
struct Segments {
    other: [usize; 2 * MAX_DEPTH],
    forward: [bool; 2 * MAX_DEPTH],
}

const MAX_DEPTH: usize = 16;

fn segments(tour: &Tour, t: &[usize]) -> Segments {
    let k = t.len() / 2;
    let mut heads = [(0usize, 0usize, 0usize); MAX_DEPTH];
    for i in 0..k {
        let (a, b) = (t[2 * i], t[2 * i + 1]);
        // (predecessor slot, successor slot)
        let (p, s) = if tour.succ(a) == b {
            (2 * i, 2 * i + 1)
        } else {
            (2 * i + 1, 2 * i)
        };
        heads[i] = (tour.pos(t[p]), p, s);
    }
    heads[..k].sort_unstable();
    let mut seg = Segments {
        other: [0; 2 * MAX_DEPTH],
        forward: [false; 2 * MAX_DEPTH],
    };
    for j in 0..k {
        let s = heads[j].2;
        let p = heads[(j + 1) % k].1;
        seg.other[s] = p;
        seg.other[p] = s;
        seg.forward[s] = true;
        seg.forward[p] = false;
    }
    seg
}

/// True when replacing the removed edges of `t` by its added and closing edges
/// yields one Hamiltonian cycle. Removed edges must be distinct tour edges.
pub fn is_feasible(tour: &Tour, t: &[usize]) -> bool {
    let len = t.len();
    debug_assert!(len >= 2 && len.is_multiple_of(2) && len / 2 <= MAX_DEPTH);
    let k = len / 2;
    if k == 1 {
        return true;
    }
    let seg = segments(tour, t);
    let mut x = 0;
    let mut count = 0;
    loop {
        x = seg.other[partner(x, len)];
        count += 1;
        if x == 0 || count > k {
            break;
        }
    }
    count == k
}

/// Applies a feasible move and updates the cached length by `gain`.
pub fn apply_move(tour: &mut Tour, mv: &KOptMove, scratch: &mut Vec<usize>) {
    let len = mv.t.len();
    let n = tour.len();
    let seg = segments(tour, &mv.t);
    scratch.clear();
    let mut x = 0;
    loop {
        let y = seg.other[x];
        let (from, to) = (tour.pos(mv.t[x]), tour.pos(mv.t[y]));
        let order = tour.order();
        if seg.forward[x] {
            let mut p = from;
            loop {
                scratch.push(order[p]);
                if p == to {
                    break;
                }
                p = if p + 1 == n { 0 } else { p + 1 };
            }
        } else {
            let mut p = from;
            loop {
                scratch.push(order[p]);
                if p == to {
                    break;
                }
                p = if p == 0 { n - 1 } else { p - 1 };
            }
        }
        x = partner(y, len);
        if x == 0 {
            break;
        }
    }
    debug_assert_eq!(scratch.len(), n);
    let new_len = tour.length() - mv.gain;
    tour.replace_order(scratch, new_len);
}

/// Total length decrease of a move on `tour`'s current edges.
pub fn move_gain(inst: &Instance, t: &[usize]) -> i64 {
    let len = t.len();
    let mut g = 0;
    for i in 0..len / 2 {
        g += inst.dist(t[2 * i], t[2 * i + 1]);
        g -= inst.dist(t[2 * i + 1], t[(2 * i + 2) % len]);
    }
    g
}

/// Cost scale: edge costs are `SCALE * d(a, b) + pi[a] + pi[b]` with integer
/// penalties rounded at this precision.
const SCALE: i64 = 100;

/// Search settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LkConfig {
    /// Maximum depth of one move.
    pub k_max: usize,
    /// Require every partial move to close into a tour, not only the accepted one.
    pub strict: bool,
    /// When no improving move starts at a city, apply the best non-improving
    /// depth-`k_max` move and keep searching from its last city.
    pub chain: bool,
    /// Do not start by removing an edge of the near graph (see [`KOptSearch::set_near`]).
    pub restricted: bool,
}

impl Default for LkConfig {
    fn default() -> Self {
        LkConfig {
            k_max: DEFAULT_K_MAX,
            strict: false,
            chain: true,
            restricted: true,
        }
    }
}

impl LkConfig {
    /// Depth-first search that accepts only closable partial moves, no chaining.
    pub fn plain(k_max: usize) -> Self {
        LkConfig {
            k_max,
            strict: true,
            chain: false,
            restricted: false,
        }
    }
}

enum Found {
    Improving(KOptMove),
    None,
}

const NONE: usize = usize::MAX;

/// Reusable search state.
pub struct KOptSearch<'a> {
    inst: &'a Instance,
    sets: &'a CandidateSets,
    cfg: LkConfig,
    pi: Vec<i64>,
    near: Vec<[usize; 2]>,
    t: Vec<usize>,
    // gain after each removed edge / after each added edge
    g_rm: Vec<i64>,
    g_add: Vec<i64>,
    scratch: Vec<usize>,
    // cheapest candidate cost to a non-neighbor, per city
    min_cost: Vec<i64>,
    // tour at the start of the current chain
    old: Vec<[usize; 2]>,
    excluded: Vec<(usize, usize)>,
    best_t: Vec<usize>,
    best_g: i64,
}

#[inline]
fn same_edge(e: (usize, usize), a: usize, b: usize) -> bool {
    (e.0 == a && e.1 == b) || (e.0 == b && e.1 == a)
}

impl<'a> KOptSearch<'a> {
    pub fn new(inst: &'a Instance, sets: &'a CandidateSets, cfg: LkConfig) -> Self {
        let n = inst.len();
        let k_max = cfg.k_max.clamp(2, MAX_DEPTH);
        KOptSearch {
            inst,
            sets,
            cfg: LkConfig { k_max, ..cfg },
            pi: vec![0; n],
            near: vec![[NONE; 2]; n],
            t: Vec::with_capacity(2 * k_max),
            g_rm: vec![0; k_max + 1],
            g_add: vec![0; k_max + 1],
            scratch: Vec::with_capacity(n),
            min_cost: vec![0; n],
            old: vec![[NONE; 2]; n],
            excluded: Vec::new(),
            best_t: Vec::new(),
            best_g: i64::MIN,
        }
    }

    /// Node penalties added to edge costs during the search. Gains of closed
    /// moves are unaffected; pruning and chaining see the transformed costs.
    pub fn set_penalties(&mut self, pi: &[f64]) {
        for (p, &x) in self.pi.iter_mut().zip(pi) {
            *p = (x * SCALE as f64).round() as i64;
        }
    }

    /// Edges that restricted search will not remove first: each city lists up
    /// to two neighbors, and an edge is near when either end lists the other.
    pub fn set_near(&mut self, near: Vec<[usize; 2]>) {
        debug_assert_eq!(near.len(), self.inst.len());
        self.near = near;
    }

    /// Near graph of a tour: every city lists its two tour neighbors.
    pub fn near_from_tour(tour: &Tour) -> Vec<[usize; 2]> {
        let mut near = vec![[NONE; 2]; tour.len()];
        for (c, slot) in near.iter_mut().enumerate() {
            *slot = [tour.pred(c), tour.succ(c)];
        }
        near
    }

    #[inline]
    fn is_near(&self, a: usize, b: usize) -> bool {
        self.near[a].contains(&b) || self.near[b].contains(&a)
    }

    #[inline]
    fn c(&self, a: usize, b: usize) -> i64 {
        SCALE * self.inst.dist(a, b) + self.pi[a] + self.pi[b]
    }

    fn refresh_city(&mut self, tour: &Tour, a: usize) {
        let (p, s) = (tour.pred(a), tour.succ(a));
        self.old[a] = [p, s];
        let mut m = i64::MAX;
        for cand in self.sets.of(a) {
            if cand.to != p && cand.to != s {
                m = m.min(self.c(a, cand.to));
            }
        }
        self.min_cost[a] = m;
    }

    fn excludable(&self, a: usize, b: usize) -> bool {
        self.old[a].contains(&b) && !self.excluded.iter().any(|&e| same_edge(e, a, b))
    }

    /// First improving sequential move starting at `p1`, if any.
    pub fn step(&mut self, tour: &Tour, p1: usize) -> Option<KOptMove> {
        for q in [tour.pred(p1), tour.succ(p1)] {
            self.t.clear();
            self.t.push(p1);
            self.t.push(q);
            self.best_g = i64::MIN;
            if let Found::Improving(mv) = self.extend(tour, 1, self.c(p1, q), false) {
                return Some(mv);
            }
        }
        None
    }

    /// `t` holds `2k` cities ending with a removed edge; `g` is removed minus
    /// added cost so far, without a closing edge.
    fn extend(&mut self, tour: &Tour, k: usize, g: i64, record: bool) -> Found {
        let t1 = self.t[0];
        let q = self.t[2 * k - 1];
        self.g_rm[k] = g;
        let feasible = is_feasible(tour, &self.t);
        if self.cfg.strict && !feasible {
            return Found::None;
        }
        if k >= 2 && feasible {
            let total = g - self.c(q, t1);
            if total > 0 {
                debug_assert_eq!(total % SCALE, 0);
                return Found::Improving(KOptMove {
                    t: self.t.clone(),
                    gain: total / SCALE,
                });
            }
            if record && k == self.cfg.k_max {
                self.consider_best(k, g);
            }
        }
        if k >= self.cfg.k_max {
            return Found::None;
        }
        for c in self.sets.of(q) {
            let r = c.to;
            if tour.adjacent(q, r) {
                continue;
            }
            let g1 = g - self.c(q, r);
            if g1 <= 0 {
                continue;
            }
            self.g_add[k] = g1;
            self.t.push(r);
            for s in [tour.pred(r), tour.succ(r)] {
                if s == t1 || self.removed_before(k + 1, r, s) {
                    continue;
                }
                self.t.push(s);
                if let Found::Improving(mv) = self.extend(tour, k + 1, g1 + self.c(r, s), record) {
                    return Found::Improving(mv);
                }
                self.t.pop();
            }
            self.t.pop();
        }
        Found::None
    }

    fn removed_before(&self, k: usize, a: usize, b: usize) -> bool {
        (0..k - 1).any(|i| same_edge((self.t[2 * i], self.t[2 * i + 1]), a, b))
    }

    /// Keeps the depth-`k` partial move in `t` as the chain candidate when it
    /// leaves the most gain.
    fn consider_best(&mut self, k: usize, g: i64) {
        let (a, b) = (self.t[2 * k - 2], self.t[2 * k - 1]);
        if g - SCALE < self.min_cost[b] {
            return;
        }
        let better = g > self.best_g
            || (g == self.best_g && !self.is_near(a, b) && {
                let l = self.best_t.len();
                self.is_near(self.best_t[l - 2], self.best_t[l - 1])
            });
        if !better || !self.excludable(a, b) {
            return;
        }
        if self.cfg.restricted && self.gain_is_flat(k) {
            return;
        }
        self.best_g = g;
        self.best_t.clear();
        self.best_t.extend_from_slice(&self.t);
    }

    /// True when the move's gains differ from the penalty-free ones by the
    /// endpoint penalties only, so its cost is the same under every penalty.
    fn gain_is_flat(&self, k: usize) -> bool {
        let t = &self.t;
        let rm = |i: usize| self.g_rm[i] - self.pi[t[2 * i - 1]];
        let add = |i: usize| self.g_add[i] + self.pi[t[2 * i]];
        (2..k).all(|i| rm(i) == rm(1)) && (2..k).all(|i| add(i) == add(1))
    }

    fn apply(&mut self, tour: &mut Tour, t: &[usize]) {
        let mv = KOptMove {
            t: t.to_vec(),
            gain: move_gain(self.inst, t),
        };
        let mut scratch = std::mem::take(&mut self.scratch);
        apply_move(tour, &mv, &mut scratch);
        self.scratch = scratch;
        debug_assert!(tour.is_consistent(self.inst));
    }

    /// Tries to improve the tour starting at `t1`. Cities touched by an
    /// improvement are appended to `touched`.
    fn improve_from(&mut self, tour: &mut Tour, t1: usize, touched: &mut Vec<usize>) -> bool {
        let n = tour.len();
        for x2 in 0..2 {
            let t2 = if x2 == 0 { tour.pred(t1) } else { tour.succ(t1) };
            if self.cfg.restricted && self.is_near(t1, t2) {
                continue;
            }
            let mut saved: Option<(Vec<usize>, i64)> = None;
            let start = touched.len();
            self.excluded.clear();
            let mut g = self.c(t1, t2);
            let mut cur = t2;
            let mut steps = 0;
            loop {
                self.best_g = i64::MIN;
                self.t.clear();
                self.t.push(t1);
                self.t.push(cur);
                if let Found::Improving(mv) = self.extend(tour, 1, g, self.cfg.chain) {
                    touched.extend_from_slice(&mv.t);
                    self.apply(tour, &mv.t);
                    for &a in touched.iter() {
                        self.refresh_city(tour, a);
                    }
                    return true;
                }
                if !self.cfg.chain || self.best_g == i64::MIN || steps * self.cfg.k_max >= n {
                    break;
                }
                if saved.is_none() {
                    saved = Some((tour.order().to_vec(), tour.length()));
                }
                let t = std::mem::take(&mut self.best_t);
                let k = t.len() / 2;
                for i in 0..k {
                    self.excluded.push((t[2 * i], t[2 * i + 1]));
                }
                self.apply(tour, &t);
                touched.extend_from_slice(&t);
                g = self.best_g;
                cur = t[2 * k - 1];
                self.best_t = t;
                steps += 1;
            }
            if let Some((mut order, len)) = saved {
                tour.replace_order(&mut order, len);
            }
            touched.truncate(start);
        }
        false
    }

    /// Improves `tour` until no improving move starts from any active city.
    /// Every city starts active; cities touched by an improvement are
    /// reactivated. Returns the number of improvements.
    pub fn optimize(&mut self, tour: &mut Tour) -> usize {
        let n = tour.len();
        for c in 0..n {
            self.refresh_city(tour, c);
        }
        let mut queued = vec![true; n];
        let mut queue: VecDeque<usize> = tour.order().iter().copied().collect();
        let mut touched = Vec::new();
        let mut moves = 0;
        while let Some(c) = queue.pop_front() {
            queued[c] = false;
            touched.clear();
            if self.improve_from(tour, c, &mut touched) {
                moves += 1;
                touched.push(c);
                for &x in &touched {
                    if !queued[x] {
                        queued[x] = true;
                        queue.push_back(x);
                    }
                }
            }
        }
        moves
    }
}

/// First improving sequential move from `p1`.
pub fn sequential_step(
    inst: &Instance,
    tour: &Tour,
    p1: usize,
    sets: &CandidateSets,
    k_max: usize,
) -> Option<KOptMove> {
    KOptSearch::new(inst, sets, LkConfig::plain(k_max)).step(tour, p1)
}

/// Runs the plain search to a local optimum and returns the improved tour.
pub fn lin_kernighan(inst: &Instance, mut tour: Tour, sets: &CandidateSets, k_max: usize) -> Tour {
    KOptSearch::new(inst, sets, LkConfig::plain(k_max)).optimize(&mut tour);
    tour
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidate::build_candidate_sets;
    use crate::instance::WeightKind;
    use crate::one_tree::{alpha_values, ascend_penalties};
    use crate::tour::choose_initial_tour;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(pts: Vec<(f64, f64)>, cs: usize) -> (Instance, CandidateSets) {
        let inst = Instance::from_coords("t", WeightKind::Euc2d, pts).unwrap();
        let n = inst.len();
        let asc = ascend_penalties(&inst);
        let table = alpha_values(&inst, &asc.tree, &asc.penalties, n - 1);
        let sets = build_candidate_sets(&table, &inst, cs.min(n - 1)).unwrap();
        (inst, sets)
    }

    fn random_points(n: usize, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
        (0..n)
            .map(|_| (rng.gen_range(0.0..1000.0), rng.gen_range(0.0..1000.0)))
            .collect()
    }

    fn brute_force(inst: &Instance) -> i64 {
        fn rec(inst: &Instance, order: &mut Vec<usize>, used: &mut [bool], best: &mut i64) {
            if order.len() == used.len() {
                *best = (*best).min(inst.tour_length(order));
                return;
            }
            for c in 1..used.len() {
                if !used[c] {
                    used[c] = true;
                    order.push(c);
                    rec(inst, order, used, best);
                    order.pop();
                    used[c] = false;
                }
            }
        }
        let mut used = vec![false; inst.len()];
        used[0] = true;
        let mut best = i64::MAX;
        rec(inst, &mut vec![0], &mut used, &mut best);
        best
    }

    fn square() -> (Instance, CandidateSets) {
        setup(vec![(0.0, 0.0), (100.0, 0.0), (100.0, 100.0), (0.0, 100.0)], 3)
    }

    #[test]
    fn feasibility_of_two_opt_variants() {
        let (inst, _) = setup((0..8).map(|i| (i as f64 * 10.0, (i % 3) as f64)).collect(), 5);
        let tour = Tour::from_order(&inst, (0..8).collect()).unwrap();
        // remove (0,1) and (4,5), add (1,5), close (4,0): valid 2-opt
        assert!(is_feasible(&tour, &[0, 1, 5, 4]));
        // add (1,4), close (5,0): two cycles
        assert!(!is_feasible(&tour, &[0, 1, 4, 5]));
        // pure 3-opt segment swap (or3opt "a'bc" variant) is feasible
        assert!(is_feasible(&tour, &[0, 1, 4, 5, 2, 3]) || is_feasible(&tour, &[0, 1, 5, 4, 2, 3]));
    }

    #[test]
    fn feasibility_matches_brute_force_reconnection() {
        // enumerate 3-opt slot assignments on a 9-city tour and compare with an
        // explicit adjacency rebuild
        let (inst, _) = setup((0..9).map(|i| (i as f64, (i * i % 7) as f64)).collect(), 5);
        let tour = Tour::from_order(&inst, (0..9).collect()).unwrap();
        let n = 9;
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let mut checked = 0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if a == b || b == c || a == c {
                        continue;
                    }
                    for flips in 0..8u32 {
                        let pick = |e: (usize, usize), f: bool| if f { (e.1, e.0) } else { e };
                        let e0 = pick(edges[a], flips & 1 != 0);
                        let e1 = pick(edges[b], flips & 2 != 0);
                        let e2 = pick(edges[c], flips & 4 != 0);
                        let t = [e0.0, e0.1, e1.0, e1.1, e2.0, e2.1];
                        let mut adj: Vec<Vec<usize>> = vec![vec![]; n];
                        for &(x, y) in &edges {
                            let removed = [(t[0], t[1]), (t[2], t[3]), (t[4], t[5])]
                                .iter()
                                .any(|&(p, q)| (p, q) == (x, y) || (q, p) == (x, y));
                            if !removed {
                                adj[x].push(y);
                                adj[y].push(x);
                            }
                        }
                        for (x, y) in [(t[1], t[2]), (t[3], t[4]), (t[5], t[0])] {
                            adj[x].push(y);
                            adj[y].push(x);
                        }
                        let mut prev = usize::MAX;
                        let mut cur = 0;
                        let mut steps = 0;
                        let mut ok = adj.iter().all(|l| l.len() == 2);
                        while ok {
                            let next = if adj[cur][0] != prev { adj[cur][0] } else { adj[cur][1] };
                            if adj[cur][0] == adj[cur][1] {
                                ok = false;
                                break;
                            }
                            prev = cur;
                            cur = next;
                            steps += 1;
                            if cur == 0 {
                                break;
                            }
                        }
                        let expect = ok && steps == n;
                        assert_eq!(is_feasible(&tour, &t), expect, "t = {t:?}");
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 1000);
    }

    #[test]
    fn uncrosses_square() {
        let (inst, sets) = square();
        let tour = Tour::from_order(&inst, vec![0, 2, 1, 3]).unwrap();
        assert_eq!(tour.length(), 2 * 141 + 200);
        let mv = sequential_step(&inst, &tour, 0, &sets, 5).expect("crossed tour improves");
        assert_eq!(mv.k(), 2);
        assert_eq!(mv.gain, 2 * (141 - 100));
        let out = lin_kernighan(&inst, tour, &sets, 5);
        assert_eq!(out.length(), 400);
        assert!(out.is_consistent(&inst));
    }

    #[test]
    fn optimal_tour_has_no_move() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (inst, sets) = setup(random_points(5, &mut rng), 4);
        let opt = brute_force(&inst);
        let mut order: Vec<usize> = (0..5).collect();
        // find an optimal order
        let perms = [[0, 1, 2, 3, 4], [0, 1, 2, 4, 3], [0, 1, 3, 2, 4], [0, 1, 3, 4, 2], [0, 1, 4, 2, 3], [0, 1, 4, 3, 2],
            [0, 2, 1, 3, 4], [0, 2, 1, 4, 3], [0, 2, 3, 1, 4], [0, 2, 4, 1, 3], [0, 3, 1, 2, 4], [0, 3, 2, 1, 4]];
        for p in perms {
            if inst.tour_length(&p) == opt {
                order = p.to_vec();
            }
        }
        let tour = Tour::from_order(&inst, order).unwrap();
        assert_eq!(tour.length(), opt);
        for c in 0..5 {
            assert!(sequential_step(&inst, &tour, c, &sets, 5).is_none());
        }
        assert_eq!(lin_kernighan(&inst, tour, &sets, 5).length(), opt);
    }

    #[test]
    fn no_move_when_gain_rule_prunes_everything() {
        // a regular polygon tour is optimal; every candidate is at least as long
        // as the removed edges at depth 1
        let pts: Vec<(f64, f64)> = (0..12)
            .map(|i| {
                let a = i as f64 * std::f64::consts::TAU / 12.0;
                (1000.0 * a.cos(), 1000.0 * a.sin())
            })
            .collect();
        let (inst, sets) = setup(pts, 5);
        let tour = Tour::from_order(&inst, (0..12).collect()).unwrap();
        for c in 0..12 {
            assert!(sequential_step(&inst, &tour, c, &sets, 5).is_none());
        }
    }

    #[test]
    fn restarts_find_brute_force_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut solved = 0;
        for _ in 0..20 {
            let n = rng.gen_range(6..=10);
            let (inst, sets) = setup(random_points(n, &mut rng), 5);
            let opt = brute_force(&inst);
            let mut best = i64::MAX;
            for _ in 0..20 {
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut rng);
                let t = lin_kernighan(&inst, Tour::from_order(&inst, order).unwrap(), &sets, 5);
                assert!(t.is_consistent(&inst));
                best = best.min(t.length());
            }
            assert!(best >= opt);
            solved += (best == opt) as usize;
        }
        assert!(solved >= 19, "solved {solved}/20");
    }

    #[test]
    fn result_is_two_opt_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (inst, sets) = setup(random_points(80, &mut rng), 5);
        let start = choose_initial_tour(&inst, None, &sets, &mut rng);
        let t = lin_kernighan(&inst, start, &sets, 5);
        let o = t.order();
        let n = o.len();
        for i in 0..n {
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b, c, d) = (o[i], o[i + 1], o[j], o[(j + 1) % n]);
                // only moves adding a candidate edge are in the neighborhood
                if !sets.contains(b, d) && !sets.contains(a, c) {
                    continue;
                }
                let delta = inst.dist(a, c) + inst.dist(b, d) - inst.dist(a, b) - inst.dist(c, d);
                assert!(delta >= 0, "improving 2-opt remains at {i},{j}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn monotone_and_valid(seed in any::<u64>(), n in 5usize..40, reverse in any::<bool>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (inst, mut sets) = setup(random_points(n, &mut rng), 5);
            if reverse {
                sets.resort(|_, c| -c.alpha);
            }
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let start = Tour::from_order(&inst, order).unwrap();
            let before = start.length();
            let mut search = KOptSearch::new(&inst, &sets, LkConfig::plain(5));
            let mut tour = start;
            loop {
                let mut improved = false;
                for c in 0..n {
                    if let Some(mv) = search.step(&tour, c) {
                        prop_assert!(mv.gain > 0);
                        let prev = tour.length();
                        let mut scratch = Vec::new();
                        apply_move(&mut tour, &mv, &mut scratch);
                        prop_assert!(tour.is_consistent(&inst));
                        prop_assert_eq!(tour.length(), prev - mv.gain);
                        improved = true;
                    }
                }
                if !improved {
                    break;
                }
            }
            prop_assert!(tour.length() <= before);
        }

        #[test]
        fn chained_search_is_monotone(seed in any::<u64>(), n in 5usize..60, near_tour in any::<bool>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = Instance::from_coords("t", WeightKind::Euc2d, random_points(n, &mut rng)).unwrap();
            let asc = ascend_penalties(&inst);
            let table = alpha_values(&inst, &asc.tree, &asc.penalties, n - 1);
            let sets = build_candidate_sets(&table, &inst, 5.min(n - 1)).unwrap();
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let mut tour = Tour::from_order(&inst, order).unwrap();
            let before = tour.length();
            let mut search = KOptSearch::new(&inst, &sets, LkConfig::default());
            search.set_penalties(asc.penalties.as_slice());
            if near_tour {
                search.set_near(KOptSearch::near_from_tour(&tour));
            }
            search.optimize(&mut tour);
            prop_assert!(tour.is_consistent(&inst));
            prop_assert!(tour.length() <= before);
        }
    }

    #[test]
    fn penalties_do_not_change_closed_gains() {
        let (inst, sets) = square();
        let tour = Tour::from_order(&inst, vec![0, 2, 1, 3]).unwrap();
        let plain = KOptSearch::new(&inst, &sets, LkConfig::plain(5)).step(&tour, 0);
        assert!(plain.is_some());
        let mut search = KOptSearch::new(&inst, &sets, LkConfig::plain(5));
        search.set_penalties(&[0.37, -1.2, 2.0, 0.5]);
        let with_pi = search.step(&tour, 0);
        assert_eq!(plain.map(|m| m.gain), with_pi.map(|m| m.gain));
    }
}
