//! Learners consuming labeled examples of `(Γ_ℓ, D_ℓ)`: exhaustive junta enumeration, the
//! guess-the-root decision-tree search, and a capped greedy DNF builder.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::combinadic::ones;
use crate::construction::LiftedDistribution;
use crate::dnf::{junta_rows_to_dnf, DecisionTree, Dnf, Term};
use crate::point::{LiftedPoint, Var};
use crate::sampler::draw_indexed;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LearnerError {
    #[error("no {m}-subset of the variables is consistent with the sample")]
    NoConsistentSubset { m: usize },
    #[error("no decision tree of size {s} is consistent with the sample")]
    NoConsistentTree { s: usize },
    #[error("invalid learner parameter: {0}")]
    BadParameter(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Example {
    pub point: LiftedPoint,
    pub label: bool,
}

/// Labeled draws from the two-phase sampler; draw `i` depends only on `(seed, i)`.
#[derive(Debug, Clone)]
pub struct SampleOracle<'a> {
    dist: &'a LiftedDistribution,
    seed: u64,
    next: u64,
}

impl<'a> SampleOracle<'a> {
    pub fn new(dist: &'a LiftedDistribution, seed: u64) -> Self {
        SampleOracle {
            dist,
            seed,
            next: 0,
        }
    }

    pub fn distribution(&self) -> &LiftedDistribution {
        self.dist
    }

    pub fn draw(&mut self) -> Example {
        let trace = draw_indexed(self.dist, self.seed, self.next);
        self.next += 1;
        let label = self
            .dist
            .gamma(&trace.output)
            .expect("sampler output lies on the support");
        Example {
            point: trace.output,
            label,
        }
    }

    /// `count` draws with duplicates removed, first occurrence order kept.
    pub fn sample(&mut self, count: u64) -> Vec<Example> {
        let mut seen = HashSet::new();
        (0..count)
            .map(|_| self.draw())
            .filter(|e| seen.insert(e.point.clone()))
            .collect()
    }
}

/// Every support point with its label, Top first.
pub fn full_support_sample(dist: &LiftedDistribution) -> Vec<Example> {
    dist.top_points()
        .map(|point| Example { point, label: true })
        .chain(dist.bottom_points().map(|point| Example {
            point,
            label: false,
        }))
        .collect()
}

/// `⌈8·S·ln S⌉` draws for a support of size `S`.
pub fn default_sample_size(dist: &LiftedDistribution) -> u64 {
    let s = dist.support_size().unwrap_or(u128::MAX) as f64;
    (8.0 * s * s.ln().max(1.0)).ceil() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LearnerBudget {
    pub examples: u64,
    pub steps: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearnerOutput {
    /// Absent exactly when the run aborted.
    pub hypothesis: Option<Dnf>,
    pub tree: Option<DecisionTree>,
    pub steps_used: u64,
    pub aborted: bool,
    pub sample_size: usize,
}

impl LearnerOutput {
    fn done(hypothesis: Dnf, steps: &Steps, sample_size: usize) -> Self {
        LearnerOutput {
            hypothesis: Some(hypothesis),
            tree: None,
            steps_used: steps.used,
            aborted: false,
            sample_size,
        }
    }

    fn aborted(steps: &Steps, sample_size: usize) -> Self {
        LearnerOutput {
            hypothesis: None,
            tree: None,
            steps_used: steps.used,
            aborted: true,
            sample_size,
        }
    }
}

#[derive(Debug)]
struct Abort;

#[derive(Debug)]
struct Steps {
    used: u64,
    limit: u64,
}

impl Steps {
    fn new(limit: u64) -> Self {
        Steps { used: 0, limit }
    }

    fn tick(&mut self) -> Result<(), Abort> {
        if self.used >= self.limit {
            return Err(Abort);
        }
        self.used += 1;
        Ok(())
    }
}

pub trait Learner {
    fn name(&self) -> String;

    /// Runs on an explicit sample under a step limit.
    fn learn_sample(&self, sample: &[Example], steps: u64) -> Result<LearnerOutput, LearnerError>;

    /// Draws `budget.examples` labeled points and runs on the distinct ones.
    fn learn(
        &self,
        oracle: &mut SampleOracle<'_>,
        budget: &LearnerBudget,
    ) -> Result<LearnerOutput, LearnerError> {
        let sample = oracle.sample(budget.examples);
        self.learn_sample(&sample, budget.steps)
    }
}

/// True iff `f` labels every example correctly.
pub fn consistent(f: &Dnf, sample: &[Example]) -> bool {
    sample.iter().all(|e| f.accepts(&e.point) == e.label)
}

fn shape(sample: &[Example]) -> Option<(usize, usize)> {
    sample.first().map(|e| (e.point.n(), e.point.ell()))
}

/// Tries `m`-subsets of the `n·ℓ` variables in lexicographic order and returns the truth
/// table of the first one consistent with the sample (unseen rows read 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JuntaLearner {
    pub m: usize,
}

impl Learner for JuntaLearner {
    fn name(&self) -> String {
        format!("junta(m={})", self.m)
    }

    fn learn_sample(&self, sample: &[Example], steps: u64) -> Result<LearnerOutput, LearnerError> {
        let Some((n, ell)) = shape(sample) else {
            let s = Steps::new(steps);
            return Ok(LearnerOutput::done(Dnf::empty(), &s, 0));
        };
        let vars: Vec<Var> = (0..n)
            .flat_map(|i| (0..ell).map(move |t| Var::new(i, t)))
            .collect();
        if self.m > vars.len() {
            return Err(LearnerError::BadParameter(format!(
                "m = {} exceeds the {} variables",
                self.m,
                vars.len()
            )));
        }
        if self.m > 63 {
            return Err(LearnerError::BadParameter("m must be below 64".into()));
        }
        let mut steps = Steps::new(steps);
        let mut subset: Vec<usize> = (0..self.m).collect();
        loop {
            let chosen: Vec<Var> = subset.iter().map(|&k| vars[k]).collect();
            let mut table: HashMap<u64, bool> = HashMap::new();
            let mut ok = true;
            for e in sample {
                if steps.tick().is_err() {
                    return Ok(LearnerOutput::aborted(&steps, sample.len()));
                }
                let row = chosen
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| e.point.bit(**v))
                    .fold(0u64, |r, (k, _)| r | 1 << k);
                if *table.entry(row).or_insert(e.label) != e.label {
                    ok = false;
                    break;
                }
            }
            if ok {
                let mut rows: Vec<u64> = table
                    .into_iter()
                    .filter(|&(_, l)| l)
                    .map(|(r, _)| r)
                    .collect();
                rows.sort_unstable();
                let f = junta_rows_to_dnf(&chosen, rows);
                return Ok(LearnerOutput::done(f, &steps, sample.len()));
            }
            if !next_combination(&mut subset, vars.len()) {
                return Err(LearnerError::NoConsistentSubset { m: self.m });
            }
        }
    }
}

/// Advances a strictly increasing index list to the next combination of `0..n`.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
        return false;
    };
    c[i] += 1;
    for t in i + 1..k {
        c[t] = c[t - 1] + 1;
    }
    true
}

/// Guess-the-root decision-tree search: a node of size `s` tries each splitting variable
/// with one child at size `⌊s/2⌋` and the other at `s`. Finds a tree whenever one with at
/// most `s` leaves is consistent; the tree it returns may be larger.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EhTreeLearner {
    pub s: usize,
}

type Memo = HashMap<(Vec<u64>, usize), Option<DecisionTree>>;

struct TreeSearch<'a> {
    sample: &'a [Example],
    vars: Vec<Var>,
    memo: Memo,
    steps: Steps,
}

impl TreeSearch<'_> {
    fn fingerprint(idx: &[usize]) -> Vec<u64> {
        let mut bits = Vec::new();
        for &i in idx {
            if bits.len() <= i / 64 {
                bits.resize(i / 64 + 1, 0);
            }
            bits[i / 64] |= 1 << (i % 64);
        }
        bits
    }

    fn find(&mut self, idx: &[usize], s: usize) -> Result<Option<DecisionTree>, Abort> {
        for _ in idx {
            self.steps.tick()?;
        }
        let label = idx.first().map(|&i| self.sample[i].label).unwrap_or(false);
        if idx.iter().all(|&i| self.sample[i].label == label) {
            return Ok(Some(DecisionTree::Leaf(label)));
        }
        if s <= 1 {
            return Ok(None);
        }
        let key = (Self::fingerprint(idx), s);
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let mut found = None;
        'vars: for k in 0..self.vars.len() {
            let v = self.vars[k];
            let (one, zero): (Vec<usize>, Vec<usize>) =
                idx.iter().partition(|&&i| self.sample[i].point.bit(v));
            if one.is_empty() || zero.is_empty() {
                continue;
            }
            for small_on_zero in [true, false] {
                let (sz, so) = if small_on_zero {
                    (s / 2, s)
                } else {
                    (s, s / 2)
                };
                let Some(t0) = self.find(&zero, sz)? else {
                    continue;
                };
                let Some(t1) = self.find(&one, so)? else {
                    continue;
                };
                found = Some(DecisionTree::node(v, t0, t1));
                break 'vars;
            }
        }
        self.memo.insert(key, found.clone());
        Ok(found)
    }
}

impl Learner for EhTreeLearner {
    fn name(&self) -> String {
        format!("ehdt(s={})", self.s)
    }

    fn learn_sample(&self, sample: &[Example], steps: u64) -> Result<LearnerOutput, LearnerError> {
        if self.s == 0 {
            return Err(LearnerError::BadParameter("s must be at least 1".into()));
        }
        let vars = shape(sample)
            .map(|(n, ell)| {
                (0..n)
                    .flat_map(|i| (0..ell).map(move |t| Var::new(i, t)))
                    .collect()
            })
            .unwrap_or_default();
        let mut search = TreeSearch {
            sample,
            vars,
            memo: HashMap::new(),
            steps: Steps::new(steps),
        };
        let all: Vec<usize> = (0..sample.len()).collect();
        match search.find(&all, self.s) {
            Err(Abort) => Ok(LearnerOutput::aborted(&search.steps, sample.len())),
            Ok(None) => Err(LearnerError::NoConsistentTree { s: self.s }),
            Ok(Some(tree)) => {
                let mut out = LearnerOutput::done(tree.to_dnf(), &search.steps, sample.len());
                out.tree = Some(tree);
                Ok(out)
            }
        }
    }
}

/// Adds monotone terms one at a time, each built from a positive example's ones and pruned
/// while it still rejects every negative, picking the term covering the most uncovered
/// positives; stops after `cap` terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CappedGreedyLearner {
    pub cap: usize,
}

impl CappedGreedyLearner {
    fn captures_negative(
        term: &Term,
        negatives: &[&Example],
        steps: &mut Steps,
    ) -> Result<bool, Abort> {
        for e in negatives {
            steps.tick()?;
            if term.accepts(&e.point) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn candidate(
        p: &LiftedPoint,
        negatives: &[&Example],
        steps: &mut Steps,
    ) -> Result<Option<Term>, Abort> {
        let mut lits: Vec<Var> = p
            .blocks()
            .iter()
            .enumerate()
            .flat_map(|(i, &b)| ones(b).map(move |t| Var::new(i, t as usize)))
            .collect();
        if Self::captures_negative(&Term::positive(&lits), negatives, steps)? {
            return Ok(None);
        }
        let mut k = 0;
        while k < lits.len() {
            let mut trial = lits.clone();
            trial.remove(k);
            if Self::captures_negative(&Term::positive(&trial), negatives, steps)? {
                k += 1;
            } else {
                lits = trial;
            }
        }
        Ok(Some(Term::positive(&lits)))
    }

    fn run(&self, sample: &[Example], steps: &mut Steps) -> Result<Dnf, Abort> {
        let negatives: Vec<&Example> = sample.iter().filter(|e| !e.label).collect();
        let mut uncovered: Vec<&Example> = sample.iter().filter(|e| e.label).collect();
        let mut f = Dnf::empty();
        while f.size() < self.cap && !uncovered.is_empty() {
            let mut best: Option<(usize, Term)> = None;
            for p in &uncovered {
                let Some(term) = Self::candidate(&p.point, &negatives, steps)? else {
                    continue;
                };
                let mut covered = 0;
                for q in &uncovered {
                    steps.tick()?;
                    if term.accepts(&q.point) {
                        covered += 1;
                    }
                }
                if best.as_ref().is_none_or(|(c, _)| covered > *c) {
                    best = Some((covered, term));
                }
            }
            let Some((_, term)) = best else { break };
            uncovered.retain(|q| !term.accepts(&q.point));
            f.push(term);
        }
        Ok(f)
    }
}

impl Learner for CappedGreedyLearner {
    fn name(&self) -> String {
        format!("greedy(cap={})", self.cap)
    }

    fn learn_sample(&self, sample: &[Example], steps: u64) -> Result<LearnerOutput, LearnerError> {
        if self.cap == 0 {
            return Err(LearnerError::BadParameter("cap must be at least 1".into()));
        }
        let mut s = Steps::new(steps);
        match self.run(sample, &mut s) {
            Ok(f) => Ok(LearnerOutput::done(f, &s, sample.len())),
            Err(Abort) => Ok(LearnerOutput::aborted(&s, sample.len())),
        }
    }
}

/// Smallest number of leaves of a decision tree consistent with the sample, by exhaustive
/// search over trees (tiny samples only).
pub fn min_consistent_tree_size(sample: &[Example]) -> usize {
    fn best(sample: &[Example], idx: &[usize], vars: &[Var], cap: usize) -> Option<usize> {
        if cap == 0 {
            return None;
        }
        let label = idx.first().map(|&i| sample[i].label).unwrap_or(false);
        if idx.iter().all(|&i| sample[i].label == label) {
            return Some(1);
        }
        if cap < 2 {
            return None;
        }
        let mut out: Option<usize> = None;
        for &v in vars {
            let (one, zero): (Vec<usize>, Vec<usize>) =
                idx.iter().partition(|&&i| sample[i].point.bit(v));
            if one.is_empty() || zero.is_empty() {
                continue;
            }
            let limit = out.map_or(cap, |o| o - 1);
            if let Some(a) = best(sample, &zero, vars, limit - 1) {
                if let Some(b) = best(sample, &one, vars, limit - a) {
                    out = Some(a + b);
                }
            }
        }
        out
    }
    let Some((n, ell)) = shape(sample) else {
        return 1;
    };
    let vars: Vec<Var> = (0..n)
        .flat_map(|i| (0..ell).map(move |t| Var::new(i, t)))
        .collect();
    let all: Vec<usize> = (0..sample.len()).collect();
    best(sample, &all, &vars, sample.len().max(1)).expect("a full tree always exists")
}
