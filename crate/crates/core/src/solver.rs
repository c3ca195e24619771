//! The trial loop: warm-up trials under alpha order, then bandit-chosen blend
//! weights for re-ordering candidates, with backbone recording throughout.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backbone::BackboneStore;
use crate::bandit::{effective_weight, reward, Bandit, BanditConfig};
use crate::candidate::{build_candidate_sets, CandidateError, CandidateSets};
use crate::instance::Instance;
use crate::lk::{KOptSearch, LkConfig, DEFAULT_K_MAX};
use crate::metric::resort_blended;
use crate::one_tree::{alpha_values, ascend_penalties, OneTree, Penalties};
use crate::tour::{choose_initial_tour, Tour};

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("instance needs at least 3 cities, has {0}")]
    TooSmall(usize),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error(transparent)]
    Candidates(#[from] CandidateError),
}

/// How candidate lists are ordered after the warm-up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Bandit-selected weight, discounted over trials.
    Mabb,
    /// Fixed weight, no discount.
    FixedW(f64),
    /// Alpha order only; no backbone or bandit.
    Lkh,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Mabb => f.write_str("mabb"),
            Mode::Lkh => f.write_str("lkh"),
            Mode::FixedW(w) => write!(f, "fixed-w={w}"),
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mabb" => Ok(Mode::Mabb),
            "lkh" => Ok(Mode::Lkh),
            _ => {
                let w = s
                    .strip_prefix("fixed-w=")
                    .ok_or_else(|| format!("unknown mode `{s}` (expected mabb, lkh or fixed-w=X)"))?;
                let w: f64 = w
                    .parse()
                    .map_err(|_| format!("`{w}` is not a number"))?;
                if !(0.0..=1.0).contains(&w) {
                    return Err(format!("fixed weight {w} is outside [0, 1]"));
                }
                Ok(Mode::FixedW(w))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Defaults to the number of cities.
    pub max_trials: Option<usize>,
    /// Warm-up trials before the bandit is used.
    pub bs: usize,
    pub arms: usize,
    pub step_size: f64,
    pub ucb_c: f64,
    pub gamma: f64,
    pub candidate_size: usize,
    pub k_max: usize,
    /// Require every partial move to close into a tour.
    pub strict: bool,
    /// Continue from the best non-improving move when no improvement is found.
    pub chain: bool,
    /// Do not start moves by removing a best-tour edge (a 1-tree edge in the first trial).
    pub restricted: bool,
    pub seed: u64,
    pub mode: Mode,
    /// Overrides the instance's known optimum.
    pub optimum: Option<i64>,
    /// Keep per-trial bandit records.
    pub trace: bool,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            max_trials: None,
            bs: 100,
            arms: 5,
            step_size: 0.06,
            ucb_c: 20.0,
            gamma: 0.998,
            candidate_size: 5,
            k_max: DEFAULT_K_MAX,
            strict: false,
            chain: true,
            restricted: true,
            seed: 1,
            mode: Mode::Mabb,
            optimum: None,
            trace: false,
        }
    }
}

impl Params {
    pub fn lk_config(&self) -> LkConfig {
        LkConfig {
            k_max: self.k_max,
            strict: self.strict,
            chain: self.chain,
            restricted: self.restricted,
        }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        let bad = |m: &str| Err(SolveError::InvalidParam(m.to_string()));
        if self.arms == 0 {
            return bad("arms must be at least 1");
        }
        if self.candidate_size == 0 {
            return bad("candidate size must be at least 1");
        }
        if self.k_max < 2 {
            return bad("kmax must be at least 2");
        }
        if !(0.0..=1.0).contains(&self.step_size) {
            return bad("step size must be in [0, 1]");
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad("gamma must be in (0, 1]");
        }
        if !self.ucb_c.is_finite() || self.ucb_c < 0.0 {
            return bad("ucb c must be non-negative");
        }
        if self.max_trials == Some(0) {
            return bad("max trials must be at least 1");
        }
        Ok(())
    }

    fn bandit_config(&self) -> BanditConfig {
        BanditConfig {
            arms: self.arms,
            step_size: self.step_size,
            ucb_c: self.ucb_c,
        }
    }
}

/// One bandit round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub trial: usize,
    pub arm: usize,
    pub w: f64,
    pub reward: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub best_length: i64,
    pub best_tour: Vec<usize>,
    pub trials_used: usize,
    /// Seconds.
    pub wall_time: f64,
    pub reached_optimum: Option<bool>,
    pub bandit_trace: Option<Vec<TraceRecord>>,
}

/// Work shared by every run on one instance.
#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub penalties: Penalties,
    /// Lower bound from the penalty ascent.
    pub lower_bound: f64,
    pub candidates: CandidateSets,
    /// Edges of the final 1-tree, each listed by one of its ends.
    pub tree_near: Vec<[usize; 2]>,
    /// Seconds spent.
    pub time: f64,
}

pub fn preprocess(inst: &Instance, candidate_size: usize) -> Result<Preprocessed, SolveError> {
    let n = inst.len();
    if n < 3 {
        return Err(SolveError::TooSmall(n));
    }
    let start = Instant::now();
    let cs = candidate_size.min(n - 1);
    let asc = ascend_penalties(inst);
    let k_near = (2 * cs).max(10);
    let table = alpha_values(inst, &asc.tree, &asc.penalties, k_near);
    let candidates = build_candidate_sets(&table, inst, cs)?;
    Ok(Preprocessed {
        penalties: asc.penalties,
        lower_bound: asc.bound,
        candidates,
        tree_near: tree_near(&asc.tree, n),
        time: start.elapsed().as_secs_f64(),
    })
}

/// Roots the spanning tree away from the special node: every other city lists
/// its parent, the special node lists its two links.
fn tree_near(tree: &OneTree, n: usize) -> Vec<[usize; 2]> {
    let special = tree.special_node();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in tree.edges() {
        if a != special && b != special {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut near = vec![[usize::MAX; 2]; n];
    near[special] = tree.special_links();
    let root = if special == 0 { 1 } else { 0 };
    let mut seen = vec![false; n];
    seen[root] = true;
    seen[special] = true;
    let mut stack = vec![root];
    while let Some(a) = stack.pop() {
        for &b in &adj[a] {
            if !seen[b] {
                seen[b] = true;
                near[b][0] = a;
                stack.push(b);
            }
        }
    }
    near
}

/// Per-trial outcome from [`Run::trial`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub length: i64,
    pub improved: bool,
    pub weight: Option<f64>,
    pub arm: Option<usize>,
}

/// State of one run, advanced one trial at a time.
pub struct Run<'a> {
    inst: &'a Instance,
    params: &'a Params,
    lower_bound: f64,
    sets: CandidateSets,
    penalties: Vec<f64>,
    tree_near: Vec<[usize; 2]>,
    backbone: BackboneStore,
    bandit: Bandit,
    best: Option<Tour>,
    seed: u64,
    trials: usize,
    max_trials: usize,
    optimum: Option<i64>,
    trace: Vec<TraceRecord>,
    last_tour: Option<Tour>,
}

impl<'a> Run<'a> {
    /// Run `run_index` uses seed `params.seed + run_index`.
    pub fn new(inst: &'a Instance, pre: &Preprocessed, params: &'a Params, run_index: u64) -> Self {
        Run {
            inst,
            params,
            lower_bound: pre.lower_bound,
            sets: pre.candidates.clone(),
            penalties: pre.penalties.as_slice().to_vec(),
            tree_near: pre.tree_near.clone(),
            backbone: BackboneStore::new(inst.len()),
            bandit: Bandit::new(params.bandit_config()),
            best: None,
            seed: params.seed.wrapping_add(run_index),
            trials: 0,
            max_trials: params.max_trials.unwrap_or(inst.len()),
            optimum: params.optimum.or(inst.known_optimum()),
            trace: Vec::new(),
            last_tour: None,
        }
    }

    pub fn backbone(&self) -> &BackboneStore {
        &self.backbone
    }

    pub fn bandit(&self) -> &Bandit {
        &self.bandit
    }

    pub fn candidates(&self) -> &CandidateSets {
        &self.sets
    }

    pub fn best(&self) -> Option<&Tour> {
        self.best.as_ref()
    }

    /// Local optimum of the most recent trial.
    pub fn last_tour(&self) -> Option<&Tour> {
        self.last_tour.as_ref()
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn reached_optimum(&self) -> bool {
        matches!((&self.best, self.optimum), (Some(b), Some(o)) if b.length() <= o)
    }

    pub fn finished(&self) -> bool {
        self.trials >= self.max_trials || self.reached_optimum()
    }

    /// Runs one trial.
    pub fn trial(&mut self) -> TrialOutcome {
        let t = self.trials + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(t as u64);

        let params = self.params;
        let mut arm = None;
        let mut weight = None;
        if t > params.bs {
            match params.mode {
                Mode::Mabb => {
                    let a = self.bandit.pull();
                    let w = effective_weight(self.bandit.weights()[a], t, params.bs, params.gamma);
                    resort_blended(&mut self.sets, &self.backbone, w);
                    arm = Some(a);
                    weight = Some(w);
                }
                Mode::FixedW(w) => {
                    resort_blended(&mut self.sets, &self.backbone, w);
                    weight = Some(w);
                }
                Mode::Lkh => {}
            }
        }

        let start = choose_initial_tour(self.inst, self.best.as_ref(), &self.sets, &mut rng);
        let mut tour = start;
        let mut search = KOptSearch::new(self.inst, &self.sets, params.lk_config());
        search.set_penalties(&self.penalties);
        search.set_near(match &self.best {
            Some(b) => KOptSearch::near_from_tour(b),
            None => self.tree_near.clone(),
        });
        search.optimize(&mut tour);
        debug_assert!(tour.is_consistent(self.inst));

        if let Some(a) = arm {
            let best_len = self.best.as_ref().map_or(tour.length(), Tour::length);
            let r = reward(best_len, tour.length(), self.lower_bound);
            self.bandit.update_value(a, r);
            if params.trace {
                self.trace.push(TraceRecord {
                    trial: t,
                    arm: a,
                    w: weight.unwrap_or(0.0),
                    reward: r,
                    values: self.bandit.values().to_vec(),
                });
            }
        }
        if params.mode != Mode::Lkh {
            self.backbone
                .record_tour(tour.order())
                .expect("local search keeps tours valid");
        }
        let improved = self.best.as_ref().is_none_or(|b| tour.length() < b.length());
        let length = tour.length();
        if improved {
            self.best = Some(tour.clone());
        }
        self.last_tour = Some(tour);
        self.trials = t;
        TrialOutcome {
            trial: t,
            length,
            improved,
            weight,
            arm,
        }
    }

    /// Runs trials until the budget is spent or the optimum is reached.
    pub fn run_to_end(self) -> RunResult {
        self.run_to_end_with_backbone().0
    }

    /// Like [`Run::run_to_end`], also returning the final backbone counts.
    pub fn run_to_end_with_backbone(mut self) -> (RunResult, BackboneStore) {
        let start = Instant::now();
        while !self.finished() {
            self.trial();
        }
        let wall_time = start.elapsed().as_secs_f64();
        let reached = self.reached_optimum();
        let best = self.best.expect("at least one trial");
        let result = RunResult {
            best_length: best.length(),
            best_tour: best.into_order(),
            trials_used: self.trials,
            wall_time,
            reached_optimum: self.optimum.map(|_| reached),
            bandit_trace: self.params.trace.then_some(self.trace),
        };
        (result, self.backbone)
    }
}

/// Preprocesses and runs once with `params.seed`.
pub fn solve(inst: &Instance, params: &Params) -> Result<RunResult, SolveError> {
    params.validate()?;
    let start = Instant::now();
    let pre = preprocess(inst, params.candidate_size)?;
    let mut result = Run::new(inst, &pre, params, 0).run_to_end();
    result.wall_time = start.elapsed().as_secs_f64();
    Ok(result)
}

/// Aggregate over runs, shaped like a results-table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub instance: String,
    pub mode: Mode,
    pub runs: usize,
    /// Runs that reached the optimum; `None` if it is unknown.
    pub successes: Option<usize>,
    pub optimum: Option<i64>,
    pub best: i64,
    pub average: f64,
    pub mean_trials: f64,
    /// Mean seconds per run, preprocessing included.
    pub mean_time: f64,
    pub lower_bound: f64,
    pub results: Vec<RunResult>,
}

impl BatchSummary {
    /// `(average - optimum) / optimum`, if the optimum is known.
    pub fn gap(&self) -> Option<f64> {
        self.optimum
            .map(|o| (self.average - o as f64) / o as f64)
    }
}

/// Runs `runs` independent runs with seeds `params.seed + i`, on up to `jobs`
/// threads (0 uses all cores). Preprocessing is shared and its time is added to
/// every run.
pub fn run_batch(
    inst: &Instance,
    params: &Params,
    runs: usize,
    jobs: usize,
) -> Result<BatchSummary, SolveError> {
    run_batch_with_backbones(inst, params, runs, jobs).map(|(s, _)| s)
}

/// [`run_batch`], also returning each run's backbone counts in run order.
pub fn run_batch_with_backbones(
    inst: &Instance,
    params: &Params,
    runs: usize,
    jobs: usize,
) -> Result<(BatchSummary, Vec<BackboneStore>), SolveError> {
    params.validate()?;
    if runs == 0 {
        return Err(SolveError::InvalidParam("runs must be at least 1".into()));
    }
    let pre = preprocess(inst, params.candidate_size)?;
    let go = |i: usize| {
        let (mut r, b) = Run::new(inst, &pre, params, i as u64).run_to_end_with_backbone();
        r.wall_time += pre.time;
        (r, b)
    };
    let out: Vec<(RunResult, BackboneStore)> = if jobs == 1 {
        (0..runs).map(go).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| SolveError::InvalidParam(format!("thread pool: {e}")))?;
        pool.install(|| (0..runs).into_par_iter().map(go).collect())
    };
    let (results, backbones) = out.into_iter().unzip();
    Ok((summarize(inst, params, &pre, results), backbones))
}

fn summarize(inst: &Instance, params: &Params, pre: &Preprocessed, results: Vec<RunResult>) -> BatchSummary {
    let runs = results.len() as f64;
    let optimum = params.optimum.or(inst.known_optimum());
    BatchSummary {
        instance: inst.name().to_string(),
        mode: params.mode,
        runs: results.len(),
        successes: optimum.map(|_| {
            results
                .iter()
                .filter(|r| r.reached_optimum == Some(true))
                .count()
        }),
        optimum,
        best: results.iter().map(|r| r.best_length).min().unwrap_or(0),
        average: results.iter().map(|r| r.best_length as f64).sum::<f64>() / runs,
        mean_trials: results.iter().map(|r| r.trials_used as f64).sum::<f64>() / runs,
        mean_time: results.iter().map(|r| r.wall_time).sum::<f64>() / runs,
        lower_bound: pre.lower_bound,
        results,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::WeightKind;
    use crate::oracle::exact_optimum;
    use rand::Rng;

    fn random_instance(n: usize, seed: u64) -> Instance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Instance::from_coords(
            format!("r{seed}"),
            WeightKind::Euc2d,
            (0..n)
                .map(|_| (rng.gen_range(0.0..1000.0), rng.gen_range(0.0..1000.0)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn mode_round_trip() {
        for m in [Mode::Mabb, Mode::Lkh, Mode::FixedW(0.5), Mode::FixedW(1.0)] {
            assert_eq!(m.to_string().parse::<Mode>().unwrap(), m);
        }
        assert!("fixed-w=1.5".parse::<Mode>().is_err());
        assert!("fixed-w=x".parse::<Mode>().is_err());
        assert!("greedy".parse::<Mode>().is_err());
    }

    #[test]
    fn small_instances_hit_oracle() {
        for seed in 0..10 {
            let inst = random_instance(8, seed);
            let opt = exact_optimum(&inst).unwrap().length;
            let r = solve(&inst, &Params { seed, ..Params::default() }).unwrap();
            assert_eq!(r.best_length, opt);
            assert_eq!(inst.tour_length(&r.best_tour), r.best_length);
        }
    }

    #[test]
    fn warm_up_matches_lkh_mode() {
        let inst = random_instance(150, 3);
        let pre = preprocess(&inst, 5).unwrap();
        let p_mabb = Params { bs: 20, seed: 11, ..Params::default() };
        let p_lkh = Params { mode: Mode::Lkh, ..p_mabb.clone() };
        let mut a = Run::new(&inst, &pre, &p_mabb, 0);
        let mut b = Run::new(&inst, &pre, &p_lkh, 0);
        for _ in 0..20 {
            assert_eq!(a.trial(), b.trial());
            assert_eq!(a.last_tour(), b.last_tour());
        }
        assert_eq!(b.backbone().trials(), 0);
        assert_eq!(a.backbone().trials(), 20);
    }

    #[test]
    fn bandit_pulled_once_per_post_warmup_trial() {
        let inst = random_instance(60, 4);
        let pre = preprocess(&inst, 5).unwrap();
        let params = Params { bs: 10, max_trials: Some(30), trace: true, ..Params::default() };
        let mut run = Run::new(&inst, &pre, &params, 0);
        while run.trials() < 30 {
            run.trial();
        }
        assert_eq!(run.bandit().total(), 20);
        assert_eq!(run.backbone().trials(), 30);
        assert_eq!(run.trace.len(), 20);
    }

    #[test]
    fn batch_of_one_equals_run() {
        let inst = random_instance(40, 5);
        let params = Params { seed: 3, ..Params::default() };
        let s = run_batch(&inst, &params, 1, 1).unwrap();
        let r = solve(&inst, &params).unwrap();
        assert_eq!(s.best, r.best_length);
        assert_eq!(s.average, r.best_length as f64);
        assert_eq!(s.results[0].best_tour, r.best_tour);
        assert_eq!(s.mean_trials, r.trials_used as f64);
    }

    #[test]
    fn rejects_bad_params() {
        let inst = random_instance(10, 1);
        assert!(solve(&inst, &Params { arms: 0, ..Params::default() }).is_err());
        assert!(solve(&inst, &Params { gamma: 0.0, ..Params::default() }).is_err());
        assert!(run_batch(&inst, &Params::default(), 0, 1).is_err());
    }
}
