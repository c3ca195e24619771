//! Edge frequencies across all locally optimal tours seen so far.

use std::collections::HashMap;
use std::io::Write;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BackboneError {
    #[error("no tours recorded yet")]
    Empty,
    #[error("tour of length {len} is not a permutation of {n} cities")]
    InvalidTour { len: usize, n: usize },
}

#[derive(Debug, Clone)]
pub struct BackboneStore {
    n: usize,
    counts: HashMap<(usize, usize), u32>,
    trials: u32,
}

#[inline]
fn key(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

impl BackboneStore {
    pub fn new(n: usize) -> Self {
        BackboneStore {
            n,
            counts: HashMap::with_capacity(2 * n),
            trials: 0,
        }
    }

    /// Number of recorded tours `t`.
    pub fn trials(&self) -> u32 {
        self.trials
    }

    pub fn count(&self, i: usize, j: usize) -> u32 {
        self.counts.get(&key(i, j)).copied().unwrap_or(0)
    }

    /// Number of distinct edges ever recorded.
    pub fn distinct_edges(&self) -> usize {
        self.counts.len()
    }

    pub fn record_tour(&mut self, order: &[usize]) -> Result<(), BackboneError> {
        let invalid = BackboneError::InvalidTour {
            len: order.len(),
            n: self.n,
        };
        if order.len() != self.n || self.n < 3 {
            return Err(invalid);
        }
        let mut seen = vec![false; self.n];
        for &c in order {
            if c >= self.n || std::mem::replace(&mut seen[c], true) {
                return Err(invalid);
            }
        }
        for k in 0..self.n {
            let (a, b) = (order[k], order[(k + 1) % self.n]);
            *self.counts.entry(key(a, b)).or_insert(0) += 1;
        }
        self.trials += 1;
        Ok(())
    }

    /// `b_ij = eta_ij / t`.
    pub fn frequency(&self, i: usize, j: usize) -> Result<f64, BackboneError> {
        if self.trials == 0 {
            return Err(BackboneError::Empty);
        }
        Ok(self.count(i, j) as f64 / self.trials as f64)
    }

    /// Writes `i j eta` lines, sorted by edge.
    pub fn dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut edges: Vec<_> = self.counts.iter().collect();
        edges.sort_unstable();
        for (&(i, j), &eta) in edges {
            writeln!(out, "{i} {j} {eta}")?;
        }
        Ok(())
    }

    pub fn total_count(&self) -> u64 {
        self.counts.values().map(|&c| c as u64).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn same_tour_twice() {
        let mut b = BackboneStore::new(4);
        b.record_tour(&[0, 1, 2, 3]).unwrap();
        b.record_tour(&[0, 1, 2, 3]).unwrap();
        assert_eq!(b.trials(), 2);
        for (i, j) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
            assert_eq!(b.count(j, i), 2);
            assert_eq!(b.frequency(i, j).unwrap(), 1.0);
        }
        assert_eq!(b.frequency(0, 2).unwrap(), 0.0);
    }

    #[test]
    fn two_k4_cycles_share_two_edges() {
        // K4 has three Hamiltonian cycles; any two share exactly two edges.
        let cycles = [[0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3]];
        for a in 0..3 {
            for b in (a + 1)..3 {
                let mut store = BackboneStore::new(4);
                store.record_tour(&cycles[a]).unwrap();
                store.record_tour(&cycles[b]).unwrap();
                let twos = (0..4)
                    .flat_map(|i| ((i + 1)..4).map(move |j| (i, j)))
                    .filter(|&(i, j)| store.count(i, j) == 2)
                    .count();
                assert_eq!(twos, 2);
                assert_eq!(store.distinct_edges(), 6);
            }
        }
    }

    #[test]
    fn empty_and_invalid() {
        let mut b = BackboneStore::new(4);
        assert_eq!(b.frequency(0, 1), Err(BackboneError::Empty));
        assert!(b.record_tour(&[0, 1, 2]).is_err());
        assert!(b.record_tour(&[0, 1, 1, 3]).is_err());
        assert!(b.record_tour(&[0, 1, 2, 9]).is_err());
        assert_eq!(b.trials(), 0);
    }

    #[test]
    fn frequency_half() {
        let mut b = BackboneStore::new(4);
        for k in 0..10 {
            let tour = if k % 2 == 0 { [0, 1, 2, 3] } else { [0, 2, 1, 3] };
            b.record_tour(&tour).unwrap();
        }
        assert_eq!(b.frequency(0, 1).unwrap(), 0.5);
    }

    #[test]
    fn dump_lines() {
        let mut b = BackboneStore::new(3);
        b.record_tour(&[2, 1, 0]).unwrap();
        let mut buf = Vec::new();
        b.dump(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 1 1\n0 2 1\n1 2 1\n");
    }

    proptest! {
        #[test]
        fn conservation_and_bounds(n in 3usize..15, perms in prop::collection::vec(any::<u64>(), 1..12)) {
            let mut store = BackboneStore::new(n);
            for seed in perms {
                let mut order: Vec<usize> = (0..n).collect();
                let mut s = seed;
                for i in (1..n).rev() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    order.swap(i, (s >> 33) as usize % (i + 1));
                }
                store.record_tour(&order).unwrap();
                prop_assert_eq!(store.total_count(), (n as u64) * store.trials() as u64);
            }
            for i in 0..n {
                for j in 0..n {
                    let f = store.frequency(i, j).unwrap();
                    prop_assert!((0.0..=1.0).contains(&f));
                    prop_assert_eq!(f, store.frequency(j, i).unwrap());
                }
            }
        }
    }
}
