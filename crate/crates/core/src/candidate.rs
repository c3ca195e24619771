//! Directional candidate lists, built from alpha values and re-ordered between trials.

use std::cmp::Ordering;

use thiserror::Error;

use crate::instance::Instance;
use crate::one_tree::AlphaTable;

#[derive(Debug, Error, PartialEq)]
pub enum CandidateError {
    #[error("city {city} has {available} alpha entries, {needed} candidates requested")]
    TooFewAlphaEntries {
        city: usize,
        available: usize,
        needed: usize,
    },
    #[error("candidate size must be at least 1")]
    ZeroSize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub to: usize,
    pub alpha: f64,
    pub dist: i64,
    pub score: f64,
}

impl Candidate {
    fn order(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then(self.dist.cmp(&other.dist))
            .then(self.to.cmp(&other.to))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSets {
    lists: Vec<Vec<Candidate>>,
}

impl CandidateSets {
    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn of(&self, city: usize) -> &[Candidate] {
        &self.lists[city]
    }

    /// All `(from, candidate)` pairs.
    pub fn iter_edges(&self) -> impl Iterator<Item = (usize, &Candidate)> + '_ {
        self.lists
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.iter().map(move |c| (i, c)))
    }

    pub fn contains(&self, from: usize, to: usize) -> bool {
        self.lists[from].iter().any(|c| c.to == to)
    }

    /// Re-scores every candidate with `scorer(from, candidate)` and re-sorts each list.
    /// Membership never changes; ties fall back to distance, then city index.
    pub fn resort(&mut self, mut scorer: impl FnMut(usize, &Candidate) -> f64) {
        for (i, list) in self.lists.iter_mut().enumerate() {
            for c in list.iter_mut() {
                c.score = scorer(i, c);
            }
            list.sort_by(Candidate::order);
        }
    }

    /// Restores the initial ordering (score = alpha).
    pub fn reset_to_alpha(&mut self) {
        self.resort(|_, c| c.alpha);
    }
}

/// Takes each city's `candidate_size` smallest-alpha neighbors.
pub fn build_candidate_sets(
    alpha: &AlphaTable,
    inst: &Instance,
    candidate_size: usize,
) -> Result<CandidateSets, CandidateError> {
    if candidate_size == 0 {
        return Err(CandidateError::ZeroSize);
    }
    let mut lists = Vec::with_capacity(alpha.len());
    for i in 0..alpha.len() {
        let row = alpha.row(i);
        if row.len() < candidate_size {
            return Err(CandidateError::TooFewAlphaEntries {
                city: i,
                available: row.len(),
                needed: candidate_size,
            });
        }
        let mut list: Vec<Candidate> = row
            .iter()
            .filter(|e| e.to != i)
            .map(|e| Candidate {
                to: e.to,
                alpha: e.alpha,
                dist: inst.dist(i, e.to),
                score: e.alpha,
            })
            .collect();
        list.sort_by(Candidate::order);
        list.dedup_by_key(|c| c.to);
        list.truncate(candidate_size);
        if list.len() < candidate_size {
            return Err(CandidateError::TooFewAlphaEntries {
                city: i,
                available: list.len(),
                needed: candidate_size,
            });
        }
        lists.push(list);
    }
    Ok(CandidateSets { lists })
}

/// Convenience wrapper around [`CandidateSets::resort`].
pub fn resort_candidates(sets: &mut CandidateSets, scorer: impl FnMut(usize, &Candidate) -> f64) {
    sets.resort(scorer);
}
