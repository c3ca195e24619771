//! Array tour representation and randomized initial-tour construction.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::candidate::CandidateSets;
use crate::instance::Instance;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TourError {
    #[error("tour has {found} cities, instance has {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("city {0} is out of range or repeated")]
    NotPermutation(usize),
}

/// A closed tour: visiting order, inverse positions and cached length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tour {
    order: Vec<usize>,
    pos: Vec<usize>,
    length: i64,
}

impl Tour {
    pub fn from_order(inst: &Instance, order: Vec<usize>) -> Result<Self, TourError> {
        let n = inst.len();
        if order.len() != n {
            return Err(TourError::WrongLength {
                expected: n,
                found: order.len(),
            });
        }
        let mut pos = vec![usize::MAX; n];
        for (k, &c) in order.iter().enumerate() {
            if c >= n || pos[c] != usize::MAX {
                return Err(TourError::NotPermutation(c));
            }
            pos[c] = k;
        }
        let length = inst.tour_length(&order);
        Ok(Tour { order, pos, length })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn into_order(self) -> Vec<usize> {
        self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn length(&self) -> i64 {
        self.length
    }

    #[inline]
    pub fn pos(&self, c: usize) -> usize {
        self.pos[c]
    }

    #[inline]
    pub fn succ(&self, c: usize) -> usize {
        let p = self.pos[c] + 1;
        self.order[if p == self.order.len() { 0 } else { p }]
    }

    #[inline]
    pub fn pred(&self, c: usize) -> usize {
        let p = self.pos[c];
        self.order[if p == 0 { self.order.len() - 1 } else { p - 1 }]
    }

    #[inline]
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.succ(a) == b || self.pred(a) == b
    }

    /// Unordered tour edges.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.order.len();
        (0..n).map(move |k| (self.order[k], self.order[(k + 1) % n]))
    }

    /// Recomputes the length and checks the permutation and inverse.
    pub fn is_consistent(&self, inst: &Instance) -> bool {
        let n = inst.len();
        self.order.len() == n
            && self.pos.len() == n
            && self.order.iter().enumerate().all(|(k, &c)| c < n && self.pos[c] == k)
            && inst.tour_length(&self.order) == self.length
    }

    /// Replaces the order wholesale; `length` must be the new length.
    pub(crate) fn replace_order(&mut self, order: &mut Vec<usize>, length: i64) {
        std::mem::swap(&mut self.order, order);
        for (k, &c) in self.order.iter().enumerate() {
            self.pos[c] = k;
        }
        self.length = length;
    }
}

/// Randomized greedy walk over the candidate graph.
///
/// From a random start, each step picks uniformly among unvisited candidates of
/// the current city with zero alpha that are also neighbors in `best` (when given);
/// failing that, among any unvisited candidates; failing that, the nearest
/// unvisited city.
pub fn choose_initial_tour<R: Rng + ?Sized>(
    inst: &Instance,
    best: Option<&Tour>,
    sets: &CandidateSets,
    rng: &mut R,
) -> Tour {
    const ZERO_ALPHA: f64 = 1e-9;
    let n = inst.len();
    let mut visited = vec![false; n];
    // unvisited cities, swap-removed as they are taken
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut slot: Vec<usize> = (0..n).collect();
    let mut take = |c: usize, visited: &mut Vec<bool>, remaining: &mut Vec<usize>| {
        visited[c] = true;
        let k = slot[c];
        let last = *remaining.last().expect("nonempty");
        remaining.swap_remove(k);
        if last != c {
            slot[last] = k;
        }
    };

    let mut order = Vec::with_capacity(n);
    let mut cur = rng.gen_range(0..n);
    take(cur, &mut visited, &mut remaining);
    order.push(cur);
    let mut pool: Vec<usize> = Vec::with_capacity(16);
    while order.len() < n {
        pool.clear();
        pool.extend(sets.of(cur).iter().filter_map(|c| {
            let ok = !visited[c.to]
                && c.alpha < ZERO_ALPHA
                && best.is_none_or(|b| b.adjacent(cur, c.to));
            ok.then_some(c.to)
        }));
        if pool.is_empty() {
            pool.extend(sets.of(cur).iter().map(|c| c.to).filter(|&j| !visited[j]));
        }
        let next = match pool.choose(rng) {
            Some(&j) => j,
            None => *remaining
                .iter()
                .min_by_key(|&&j| (inst.dist(cur, j), j))
                .expect("unvisited city exists"),
        };
        take(next, &mut visited, &mut remaining);
        order.push(next);
        cur = next;
    }
    Tour::from_order(inst, order).expect("walk visits every city once")
}
