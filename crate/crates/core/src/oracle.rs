//! Exact optimum by exhaustive search, for tiny instances.

use thiserror::Error;

use crate::instance::Instance;

/// Largest instance the oracle accepts.
pub const ORACLE_MAX_CITIES: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("exhaustive search is limited to {ORACLE_MAX_CITIES} cities, instance has {0}")]
    TooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub length: i64,
    /// Optimal order starting at city 0.
    pub tour: Vec<usize>,
}

/// Enumerates every order with city 0 fixed first, pruning partial paths that
/// already reach the incumbent length.
pub fn exact_optimum(inst: &Instance) -> Result<OracleResult, OracleError> {
    let n = inst.len();
    if n > ORACLE_MAX_CITIES {
        return Err(OracleError::TooLarge(n));
    }
    if n <= 3 {
        let tour: Vec<usize> = (0..n).collect();
        return Ok(OracleResult {
            length: inst.tour_length(&tour),
            tour,
        });
    }
    let mut state = Search {
        inst,
        path: vec![0],
        used: vec![false; n],
        best_len: i64::MAX,
        best: Vec::new(),
    };
    state.used[0] = true;
    state.dfs(0);
    Ok(OracleResult {
        length: state.best_len,
        tour: state.best,
    })
}

struct Search<'a> {
    inst: &'a Instance,
    path: Vec<usize>,
    used: Vec<bool>,
    best_len: i64,
    best: Vec<usize>,
}

impl Search<'_> {
    fn dfs(&mut self, len: i64) {
        let n = self.used.len();
        let last = *self.path.last().unwrap();
        if self.path.len() == n {
            let total = len + self.inst.dist(last, 0);
            if total < self.best_len {
                self.best_len = total;
                self.best = self.path.clone();
            }
            return;
        }
        for c in 1..n {
            if self.used[c] {
                continue;
            }
            let next = len + self.inst.dist(last, c);
            if next >= self.best_len {
                continue;
            }
            self.used[c] = true;
            self.path.push(c);
            self.dfs(next);
            self.path.pop();
            self.used[c] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::WeightKind;

    #[test]
    fn triangle_is_perimeter() {
        let inst = Instance::from_coords("t", WeightKind::Euc2d, vec![(0.0, 0.0), (3.0, 0.0), (0.0, 4.0)]).unwrap();
        assert_eq!(exact_optimum(&inst).unwrap().length, 12);
    }

    #[test]
    fn square_is_four_sides() {
        let inst = Instance::from_coords(
            "sq",
            WeightKind::Euc2d,
            vec![(0.0, 0.0), (50.0, 50.0), (50.0, 0.0), (0.0, 50.0)],
        )
        .unwrap();
        let r = exact_optimum(&inst).unwrap();
        assert_eq!(r.length, 200);
        assert_eq!(inst.tour_length(&r.tour), 200);
        assert_eq!(r.tour[0], 0);
    }

    #[test]
    fn refuses_thirteen() {
        let inst = Instance::from_coords(
            "big",
            WeightKind::Euc2d,
            (0..13).map(|i| (i as f64, (i * i) as f64)).collect(),
        )
        .unwrap();
        assert_eq!(exact_optimum(&inst), Err(OracleError::TooLarge(13)));
    }

    #[test]
    fn agrees_with_plain_enumeration() {
        let pts: Vec<(f64, f64)> = (0..8).map(|i| ((i * 37 % 50) as f64, (i * 91 % 43) as f64)).collect();
        let inst = Instance::from_coords("e", WeightKind::Euc2d, pts).unwrap();
        let mut rest: Vec<usize> = (1..8).collect();
        let mut best = i64::MAX;
        fn heap(k: usize, a: &mut Vec<usize>, inst: &Instance, best: &mut i64) {
            if k == 1 {
                let mut o = vec![0];
                o.extend_from_slice(a);
                *best = (*best).min(inst.tour_length(&o));
                return;
            }
            for i in 0..k {
                heap(k - 1, a, inst, best);
                if k % 2 == 0 {
                    a.swap(i, k - 1);
                } else {
                    a.swap(0, k - 1);
                }
            }
        }
        heap(7, &mut rest, &inst, &mut best);
        assert_eq!(exact_optimum(&inst).unwrap().length, best);
    }
}
