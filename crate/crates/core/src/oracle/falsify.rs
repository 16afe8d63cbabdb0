//! Searches for small DNFs that beat the error lower bound.
//!
//! Hypotheses are indexed by one ternary digit per variable (0 absent, 1 positive,
//! 2 negated). The single-term sweep walks the reflected ternary Gray code so each step
//! changes one literal and updates per-point violation counts incrementally.

use std::cmp::Ordering;
use std::fmt;

use num::{BigInt, BigRational};
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{Oracle, OracleError};
use crate::dnf::{Dnf, Term};
use crate::point::Var;
use crate::rational::{cmp_pow2, fmt_ratio, largest_below_pow2};

/// Which size regime and bound to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LemmaVariant {
    /// `|F| < 2^{opt·ℓ/20}`, bound `1/(8|U|) - 2^{-opt·ℓ/20}`.
    V20,
    /// `|F| < 2^{opt·ℓ/16}`, bound `1/(8|U|)`.
    V16,
}

impl LemmaVariant {
    fn denominator(self) -> u64 {
        match self {
            LemmaVariant::V20 => 20,
            LemmaVariant::V16 => 16,
        }
    }
}

impl fmt::Display for LemmaVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LemmaVariant::V20 => "v20",
            LemmaVariant::V16 => "v16",
        })
    }
}

impl std::str::FromStr for LemmaVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "v20" => Ok(LemmaVariant::V20),
            "v16" => Ok(LemmaVariant::V16),
            _ => Err(format!("unknown variant {s:?} (expected v20 or v16)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    /// Every single-term DNF over all `n·ℓ` variables, plus the empty DNF.
    ExhaustiveSingleTerm,
    /// Every DNF of at most `k` distinct terms over the first `window` variables
    /// (flat order, block-major).
    ExhaustiveUpToK {
        k: usize,
        window: usize,
    },
    RandomizedLocalSearch {
        seed: u64,
        iters: u64,
    },
}

impl Strategy {
    pub fn name(&self) -> String {
        match self {
            Strategy::ExhaustiveSingleTerm => "exhaustive1".into(),
            Strategy::ExhaustiveUpToK { k, window } => format!("exhaustive-k{k}-w{window}"),
            Strategy::RandomizedLocalSearch { seed, iters } => {
                format!("local-search-s{seed}-i{iters}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// No searched hypothesis beats the bound.
    Confirmed,
    /// The best hypothesis is a genuine counterexample.
    Refuted,
    /// The bound is non-positive, or no hypothesis fits the size budget.
    Vacuous,
    /// A heuristic search found nothing below the bound.
    BestEffort,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Confirmed => "Confirmed",
            Verdict::Refuted => "Refuted",
            Verdict::Vacuous => "Vacuous",
            Verdict::BestEffort => "BestEffort",
        })
    }
}

/// Whether the search space covered every hypothesis inside the size budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    Full,
    Restricted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FalsifyReport {
    pub variant: LemmaVariant,
    pub strategy: String,
    /// Largest `s` with `s < 2^{opt·ℓ/d}`.
    pub size_budget: u64,
    /// `1/(8|U|)`.
    pub bound_base: BigRational,
    /// For v20, the exponent `e` of the subtracted `2^{-e}`.
    pub bound_subtract: Option<BigRational>,
    pub best: Dnf,
    pub best_dist: BigRational,
    pub candidates: u128,
    pub verdict: Verdict,
    pub coverage: Coverage,
    pub note: String,
}

impl FalsifyReport {
    pub fn bound_text(&self) -> String {
        match &self.bound_subtract {
            None => fmt_ratio(&self.bound_base),
            Some(e) => format!("{} - 2^(-{})", fmt_ratio(&self.bound_base), fmt_ratio(e)),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "variant": self.variant.to_string(),
            "strategy": self.strategy,
            "size_budget": self.size_budget,
            "bound": self.bound_text(),
            "best": self.best.to_string(),
            "best_dist": fmt_ratio(&self.best_dist),
            "candidates": self.candidates.to_string(),
            "verdict": self.verdict.to_string(),
            "coverage": match self.coverage { Coverage::Full => "full", Coverage::Restricted => "restricted" },
            "note": self.note,
        })
    }
}

/// Digits (least significant first) of the `index`-th word of the reflected ternary Gray
/// code of the given length.
pub fn ternary_gray(index: u64, digits: usize) -> Vec<u8> {
    let mut d = vec![0u8; digits];
    let mut rest = index;
    for slot in d.iter_mut() {
        *slot = (rest % 3) as u8;
        rest /= 3;
    }
    let mut higher = 0u32;
    let mut g = vec![0u8; digits];
    for k in (0..digits).rev() {
        g[k] = if higher % 2 == 1 { 2 - d[k] } else { d[k] };
        higher += d[k] as u32;
    }
    g
}

fn violates(state: u8, bit: bool) -> bool {
    (state == 1 && !bit) || (state == 2 && bit)
}

/// Flat support: Top points first, each as `n·ℓ` packed bits.
struct FlatSupport {
    points: Vec<u128>,
    top: usize,
    universe: u64,
}

impl FlatSupport {
    /// `2|U||Δ|^n · dist` for the given disagreement counts.
    fn key(&self, top_errors: u64, bottom_errors: u64) -> u64 {
        top_errors * self.universe + bottom_errors
    }

    fn key_of(&self, accepted: impl Fn(u128) -> bool) -> u64 {
        let top_err = self.points[..self.top]
            .iter()
            .filter(|&&p| !accepted(p))
            .count();
        let bot_err = self.points[self.top..]
            .iter()
            .filter(|&&p| accepted(p))
            .count();
        self.key(top_err as u64, bot_err as u64)
    }
}

fn term_from_digits(digits: &[u8], ell: usize) -> Term {
    let var = |k: usize| Var::new(k / ell, k % ell);
    let pos: Vec<Var> = (0..digits.len())
        .filter(|&k| digits[k] == 1)
        .map(var)
        .collect();
    let neg: Vec<Var> = (0..digits.len())
        .filter(|&k| digits[k] == 2)
        .map(var)
        .collect();
    Term::new(&pos, &neg).expect("each variable has one state")
}

fn term_masks(digits: &[u8]) -> (u128, u128) {
    digits
        .iter()
        .enumerate()
        .fold((0, 0), |(p, q), (k, &s)| match s {
            1 => (p | 1 << k, q),
            2 => (p, q | 1 << k),
            _ => (p, q),
        })
}

const CHUNK: u64 = 2048;

impl Oracle {
    fn flat_support(&self) -> Result<FlatSupport, OracleError> {
        let flat = |y: &crate::point::LiftedPoint| {
            y.flat()
                .ok_or_else(|| OracleError::BadStrategy("more than 128 variables".into()))
        };
        let mut points = Vec::with_capacity(self.top().len() + self.bottom().len());
        for y in self.top().iter().chain(self.bottom()) {
            points.push(flat(y)?);
        }
        Ok(FlatSupport {
            points,
            top: self.top().len(),
            universe: self.universe_size() as u64,
        })
    }

    fn dist_from_key(&self, key: u64) -> BigRational {
        let den = 2 * self.universe_size() as u64 * self.top().len() as u64;
        BigRational::new(key.into(), den.into())
    }

    /// Best single-term DNF (or the empty DNF) by exhaustive Gray-code sweep:
    /// `(key, witness digits or None for the empty DNF)`.
    fn sweep_single_terms(&self, sup: &FlatSupport) -> (u64, Option<Vec<u8>>) {
        let vars = self.n() * self.ell();
        let total = 3u64.pow(vars as u32);
        let chunks = total.div_ceil(CHUNK);
        let best = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = c * CHUNK;
                let end = (start + CHUNK).min(total);
                let mut digits = ternary_gray(start, vars);
                let mut viol: Vec<u32> = sup
                    .points
                    .iter()
                    .map(|&p| {
                        (0..vars)
                            .filter(|&k| violates(digits[k], p >> k & 1 == 1))
                            .count() as u32
                    })
                    .collect();
                let mut top_acc = viol[..sup.top].iter().filter(|&&v| v == 0).count() as u64;
                let mut bot_acc = viol[sup.top..].iter().filter(|&&v| v == 0).count() as u64;
                let key = |ta: u64, ba: u64| sup.key(sup.top as u64 - ta, ba);
                let mut best = (key(top_acc, bot_acc), start);
                for idx in start + 1..end {
                    let next = ternary_gray(idx, vars);
                    let k = (0..vars)
                        .find(|&k| next[k] != digits[k])
                        .expect("Gray step");
                    let (old, new) = (digits[k], next[k]);
                    for (pi, &p) in sup.points.iter().enumerate() {
                        let bit = p >> k & 1 == 1;
                        let before = viol[pi];
                        let after = before - violates(old, bit) as u32 + violates(new, bit) as u32;
                        if before != after {
                            viol[pi] = after;
                            let delta_in = before > 0 && after == 0;
                            let delta_out = before == 0 && after > 0;
                            let count = if pi < sup.top {
                                &mut top_acc
                            } else {
                                &mut bot_acc
                            };
                            if delta_in {
                                *count += 1;
                            } else if delta_out {
                                *count -= 1;
                            }
                        }
                    }
                    digits = next;
                    let kk = key(top_acc, bot_acc);
                    if kk < best.0 {
                        best = (kk, idx);
                    }
                }
                best
            })
            .min()
            .expect("at least one candidate");
        let empty_key = sup.key(sup.top as u64, 0);
        if empty_key <= best.0 {
            (empty_key, None)
        } else {
            (best.0, Some(ternary_gray(best.1, vars)))
        }
    }

    fn sweep_up_to_k(&self, sup: &FlatSupport, k: usize, window: usize) -> (u64, Vec<Vec<u8>>) {
        let term_count = 3usize.pow(window as u32);
        let words = sup.points.len().div_ceil(64);
        let all_terms: Vec<Vec<u8>> = (0..term_count as u64)
            .map(|i| {
                let mut d = ternary_gray(i, window);
                d.resize(self.n() * self.ell(), 0);
                d
            })
            .collect();
        let sets: Vec<Vec<u64>> = all_terms
            .iter()
            .map(|d| {
                let (pos, neg) = term_masks(d);
                let mut bits = vec![0u64; words];
                for (pi, &p) in sup.points.iter().enumerate() {
                    if p & pos == pos && p & neg == 0 {
                        bits[pi / 64] |= 1 << (pi % 64);
                    }
                }
                bits
            })
            .collect();
        let key_of_bits = |bits: &[u64]| {
            let mut top_acc = 0u64;
            let mut bot_acc = 0u64;
            for (w, &word) in bits.iter().enumerate() {
                for b in crate::combinadic::ones(word) {
                    if w * 64 + (b as usize) < sup.top {
                        top_acc += 1;
                    } else {
                        bot_acc += 1;
                    }
                }
            }
            sup.key(sup.top as u64 - top_acc, bot_acc)
        };
        fn dfs(
            sets: &[Vec<u64>],
            acc: &[u64],
            from: usize,
            left: usize,
            chosen: &mut Vec<usize>,
            key_of: &dyn Fn(&[u64]) -> u64,
            best: &mut (u64, Vec<usize>),
        ) {
            if left == 0 {
                return;
            }
            for i in from..sets.len() {
                let next: Vec<u64> = acc.iter().zip(&sets[i]).map(|(a, b)| a | b).collect();
                chosen.push(i);
                let key = key_of(&next);
                if key < best.0 || (key == best.0 && *chosen < best.1) {
                    *best = (key, chosen.clone());
                }
                dfs(sets, &next, i + 1, left - 1, chosen, key_of, best);
                chosen.pop();
            }
        }
        let empty = (sup.key(sup.top as u64, 0), Vec::new());
        let best = (0..sets.len())
            .into_par_iter()
            .map(|first| {
                let mut best = (key_of_bits(&sets[first]), vec![first]);
                let mut chosen = vec![first];
                dfs(
                    &sets,
                    &sets[first],
                    first + 1,
                    k - 1,
                    &mut chosen,
                    &key_of_bits,
                    &mut best,
                );
                best
            })
            .chain(rayon::iter::once(empty))
            .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)))
            .expect("nonempty");
        (
            best.0,
            best.1.into_iter().map(|i| all_terms[i].clone()).collect(),
        )
    }

    fn local_search(
        &self,
        sup: &FlatSupport,
        max_terms: usize,
        seed: u64,
        iters: u64,
    ) -> (u64, Vec<Vec<u8>>) {
        let vars = self.n() * self.ell();
        let mut rng = crate::sampler::draw_rng(seed, 0);
        let eval = |terms: &[Vec<u8>]| {
            let masks: Vec<(u128, u128)> = terms.iter().map(|d| term_masks(d)).collect();
            sup.key_of(|p| {
                masks
                    .iter()
                    .any(|&(pos, neg)| p & pos == pos && p & neg == 0)
            })
        };
        let random_term = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<u8> {
            (0..vars)
                .map(|_| match rng.gen_range(0..6) {
                    0 => 1,
                    1 => 2,
                    _ => 0,
                })
                .collect()
        };
        let mut current = vec![random_term(&mut rng)];
        let mut current_key = eval(&current);
        let mut best = (current_key, current.clone());
        for _ in 0..iters {
            let mut cand = current.clone();
            match rng.gen_range(0..4) {
                0 if cand.len() < max_terms => cand.push(random_term(&mut rng)),
                1 if cand.len() > 1 => {
                    let t = rng.gen_range(0..cand.len());
                    cand.remove(t);
                }
                _ => {
                    let t = rng.gen_range(0..cand.len());
                    let v = rng.gen_range(0..vars);
                    cand[t][v] = (cand[t][v] + rng.gen_range(1..3)) % 3;
                }
            }
            let key = eval(&cand);
            if key <= current_key {
                current = cand;
                current_key = key;
                if key < best.0 {
                    best = (key, current.clone());
                }
            }
        }
        best
    }

    /// Searches for a DNF inside the variant's size budget whose distance falls below the
    /// variant's bound. `max_candidates` caps the exhaustive search spaces.
    pub fn falsify_error_lemma(
        &self,
        variant: LemmaVariant,
        strategy: &Strategy,
        max_candidates: u128,
    ) -> Result<FalsifyReport, OracleError> {
        if self.ell() < 5 {
            return Err(OracleError::LemmaRequiresEll5);
        }
        let exponent = self.opt_ell_over(variant.denominator());
        let size_budget = largest_below_pow2(&exponent);
        let bound_base = self.pop_bound();
        let bound_subtract = (variant == LemmaVariant::V20).then(|| exponent.clone());
        let vars = self.n() * self.ell();
        let sup = self.flat_support()?;

        let beats_bound = |dist: &BigRational| match &bound_subtract {
            None => *dist < bound_base,
            // dist < base - 2^{-e}  iff  base - dist > 2^{-e}
            Some(e) => cmp_pow2(&(&bound_base - dist), &-e.clone()) == Ordering::Greater,
        };
        let bound_positive = match &bound_subtract {
            None => true,
            // base - 2^{-e} > 0  iff  2^e > 8|U|
            Some(e) => {
                cmp_pow2(
                    &BigRational::from_integer(BigInt::from(8 * self.universe_size())),
                    e,
                ) == Ordering::Less
            }
        };

        let (key, terms, candidates, full) = match strategy {
            Strategy::ExhaustiveSingleTerm => {
                let candidates = 3u128.pow(vars as u32) + 1;
                if candidates > max_candidates {
                    return Err(OracleError::BudgetExceeded {
                        needed: candidates,
                        budget: max_candidates,
                    });
                }
                let (key, digits) = self.sweep_single_terms(&sup);
                (
                    key,
                    digits.into_iter().collect(),
                    candidates,
                    size_budget <= 1,
                )
            }
            Strategy::ExhaustiveUpToK { k, window } => {
                if *k == 0 || *window == 0 || *window > vars {
                    return Err(OracleError::BadStrategy(format!(
                        "need k >= 1 and 1 <= window <= {vars}"
                    )));
                }
                let k = (*k).min(size_budget.max(1) as usize);
                let terms = 3u128.pow(*window as u32);
                let candidates = (1..=k as u128)
                    .map(|r| binomial_u128(terms, r))
                    .try_fold(1u128, |acc, c| acc.checked_add(c?))
                    .unwrap_or(u128::MAX);
                if candidates > max_candidates {
                    return Err(OracleError::BudgetExceeded {
                        needed: candidates,
                        budget: max_candidates,
                    });
                }
                let (key, digits) = self.sweep_up_to_k(&sup, k, *window);
                (
                    key,
                    digits,
                    candidates,
                    *window == vars && k as u64 >= size_budget,
                )
            }
            Strategy::RandomizedLocalSearch { seed, iters } => {
                if size_budget == 0 {
                    (sup.key(sup.top as u64, 0), Vec::new(), 1, true)
                } else {
                    let max_terms = size_budget.min(8) as usize;
                    let (key, digits) = self.local_search(&sup, max_terms, *seed, *iters);
                    (key, digits, *iters as u128 + 1, false)
                }
            }
        };

        let best: Dnf = terms
            .iter()
            .map(|d| term_from_digits(d, self.ell()))
            .collect();
        let best_dist = self.dist_from_key(key);
        debug_assert_eq!(
            self.dist_exact(&best).map(|r| r.dist),
            Ok(best_dist.clone())
        );
        let exhaustive = !matches!(strategy, Strategy::RandomizedLocalSearch { .. });
        let (verdict, note) = if size_budget == 0 {
            (
                Verdict::Vacuous,
                "no nonempty hypothesis fits the size budget".to_string(),
            )
        } else if !bound_positive {
            (Verdict::Vacuous, "the bound is not positive".to_string())
        } else if best.size() as u64 <= size_budget && beats_bound(&best_dist) {
            (Verdict::Refuted, "witness beats the bound".to_string())
        } else if exhaustive {
            let note = if full {
                "every hypothesis within the size budget was checked"
            } else {
                "only a restricted part of the size budget was checked"
            };
            (Verdict::Confirmed, note.to_string())
        } else {
            (
                Verdict::BestEffort,
                "heuristic search found no counterexample".to_string(),
            )
        };
        Ok(FalsifyReport {
            variant,
            strategy: strategy.name(),
            size_budget,
            bound_base,
            bound_subtract,
            best,
            best_dist,
            candidates,
            verdict,
            coverage: if full {
                Coverage::Full
            } else {
                Coverage::Restricted
            },
            note,
        })
    }
}

fn binomial_u128(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}
