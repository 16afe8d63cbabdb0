//! Hypotheses over lifted points: terms, DNFs and decision trees.
//!
//! A term keeps per-block masks of its positive and negative literals, so evaluation
//! is two mask tests per block.

mod text;
mod tree;

use std::fmt;

use thiserror::Error;

use crate::point::{IndexVector, LiftedPoint, Var, MAX_ELL};

pub use text::{parse_dnf, serialize_dnf};
pub use tree::{junta_rows_to_dnf, junta_to_dnf, DecisionTree};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DnfError {
    #[error("variable {var} is both positive and negative in one term")]
    ContradictoryTerm { var: Var },
    #[error("variable {var} outside (n = {n}, ell = {ell})")]
    OutOfRange { var: Var, n: usize, ell: usize },
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("contradictory term at byte {pos}: {var} appears with both signs")]
    ContradictoryAt { pos: usize, var: Var },
    #[error("truth table has {got} rows, expected 2^{vars}")]
    TableSize { got: usize, vars: usize },
    #[error("variable {var} repeated on a root-to-leaf path")]
    RepeatedPathVar { var: Var },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Term {
    // equal lengths, no trailing block where both masks are zero
    pos: Vec<u64>,
    neg: Vec<u64>,
}

impl Term {
    /// The empty conjunction, constant 1.
    pub fn one() -> Self {
        Term::default()
    }

    pub fn new(pos: &[Var], neg: &[Var]) -> Result<Self, DnfError> {
        let blocks = pos
            .iter()
            .chain(neg)
            .map(|v| v.block + 1)
            .max()
            .unwrap_or(0);
        let mut p = vec![0u64; blocks];
        let mut q = vec![0u64; blocks];
        for v in pos {
            assert!(v.pos < MAX_ELL, "position {} too large", v.pos);
            p[v.block] |= 1 << v.pos;
        }
        for v in neg {
            assert!(v.pos < MAX_ELL, "position {} too large", v.pos);
            q[v.block] |= 1 << v.pos;
        }
        Term::from_masks(p, q)
    }

    pub fn positive(vars: &[Var]) -> Self {
        Term::new(vars, &[]).expect("positive terms cannot contradict")
    }

    /// Builds from per-block masks; shorter vector is zero-padded.
    pub fn from_masks(mut pos: Vec<u64>, mut neg: Vec<u64>) -> Result<Self, DnfError> {
        let len = pos.len().max(neg.len());
        pos.resize(len, 0);
        neg.resize(len, 0);
        for (block, (&p, &q)) in pos.iter().zip(&neg).enumerate() {
            let both = p & q;
            if both != 0 {
                return Err(DnfError::ContradictoryTerm {
                    var: Var::new(block, both.trailing_zeros() as usize),
                });
            }
        }
        while pos.last() == Some(&0) && neg.last() == Some(&0) {
            pos.pop();
            neg.pop();
        }
        Ok(Term { pos, neg })
    }

    pub fn pos_mask(&self, block: usize) -> u64 {
        self.pos.get(block).copied().unwrap_or(0)
    }

    pub fn neg_mask(&self, block: usize) -> u64 {
        self.neg.get(block).copied().unwrap_or(0)
    }

    /// Number of blocks up to the last one carrying a literal.
    pub fn span(&self) -> usize {
        self.pos.len()
    }

    /// `|T|`: literal count.
    pub fn size(&self) -> usize {
        self.monotone_size()
            + self
                .neg
                .iter()
                .map(|m| m.count_ones() as usize)
                .sum::<usize>()
    }

    /// `|T_M|`: number of unnegated literals.
    pub fn monotone_size(&self) -> usize {
        self.pos.iter().map(|m| m.count_ones() as usize).sum()
    }

    pub fn is_monotone(&self) -> bool {
        self.neg.iter().all(|&m| m == 0)
    }

    /// Positive literal count per block, over `n` blocks.
    pub fn block_counts(&self, n: usize) -> Vec<u32> {
        (0..n).map(|i| self.pos_mask(i).count_ones()).collect()
    }

    /// Literals in variable order, `true` for unnegated.
    pub fn literals(&self) -> Vec<(Var, bool)> {
        let mut out = Vec::with_capacity(self.size());
        for i in 0..self.span() {
            let (p, q) = (self.pos[i], self.neg[i]);
            for t in crate::combinadic::ones(p | q) {
                out.push((Var::new(i, t as usize), p >> t & 1 == 1));
            }
        }
        out
    }

    pub fn check_bounds(&self, n: usize, ell: usize) -> Result<(), DnfError> {
        let limit = if ell >= 64 {
            u64::MAX
        } else {
            (1u64 << ell) - 1
        };
        for (var, _) in self.literals() {
            if var.block >= n || (1u64 << var.pos) & !limit != 0 {
                return Err(DnfError::OutOfRange { var, n, ell });
            }
        }
        Ok(())
    }

    /// Evaluation without bounds checks. Panics if the term uses a block the point lacks.
    pub fn accepts(&self, y: &LiftedPoint) -> bool {
        self.pos
            .iter()
            .zip(&self.neg)
            .enumerate()
            .all(|(i, (&p, &q))| {
                if p | q == 0 {
                    return true;
                }
                let b = y.block(i);
                b & p == p && b & q == 0
            })
    }

    /// `T^j`: the literals on variables `(i, j_i)`, signs kept.
    pub fn project(&self, j: &IndexVector) -> Term {
        let len = self.span().min(j.len());
        let pick = |masks: &[u64]| -> Vec<u64> {
            (0..len).map(|i| masks[i] & (1u64 << j.get(i))).collect()
        };
        Term::from_masks(pick(&self.pos), pick(&self.neg)).expect("sub-term of a valid term")
    }

    /// Evaluates a projected term at `a`, reading variable `(i, j_i)` as bit `i` of `a`.
    pub fn eval_projected(&self, j: &IndexVector, a: u64) -> bool {
        (0..self.span()).all(|i| {
            let bit = 1u64 << j.get(i);
            let ai = a >> i & 1 == 1;
            (self.pos[i] & bit == 0 || ai) && (self.neg[i] & bit == 0 || !ai)
        })
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::serialize_term(self))
    }
}

/// Checked evaluation of a single term.
pub fn eval_term(term: &Term, y: &LiftedPoint) -> Result<bool, DnfError> {
    term.check_bounds(y.n(), y.ell())?;
    Ok(term.accepts(y))
}

/// Disjunction of terms; the empty DNF is constant 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Dnf {
    terms: Vec<Term>,
}

impl Dnf {
    pub fn new(terms: Vec<Term>) -> Self {
        Dnf { terms }
    }

    pub fn empty() -> Self {
        Dnf::default()
    }

    /// A DNF with the single empty term.
    pub fn constant_one() -> Self {
        Dnf::new(vec![Term::one()])
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn push(&mut self, term: Term) {
        self.terms.push(term);
    }

    /// `|F|`: number of terms.
    pub fn size(&self) -> usize {
        self.terms.len()
    }

    pub fn is_monotone(&self) -> bool {
        self.terms.iter().all(Term::is_monotone)
    }

    pub fn max_monotone_size(&self) -> usize {
        self.terms
            .iter()
            .map(Term::monotone_size)
            .max()
            .unwrap_or(0)
    }

    pub fn check_bounds(&self, n: usize, ell: usize) -> Result<(), DnfError> {
        self.terms.iter().try_for_each(|t| t.check_bounds(n, ell))
    }

    /// Evaluation without bounds checks; see [`Dnf::check_bounds`].
    pub fn accepts(&self, y: &LiftedPoint) -> bool {
        self.terms.iter().any(|t| t.accepts(y))
    }

    pub fn eval(&self, y: &LiftedPoint) -> Result<bool, DnfError> {
        self.check_bounds(y.n(), y.ell())?;
        Ok(self.accepts(y))
    }

    /// Monotone width: the least `|T_M|` over terms satisfied by `z`, 0 when none is.
    pub fn mwidth(&self, z: &LiftedPoint) -> usize {
        self.terms
            .iter()
            .filter(|t| t.accepts(z))
            .map(Term::monotone_size)
            .min()
            .unwrap_or(0)
    }

    /// First term (in order) that is satisfied by `z` and attains the monotone width.
    pub fn width_witness(&self, z: &LiftedPoint) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for (i, t) in self.terms.iter().enumerate() {
            if t.accepts(z) {
                let w = t.monotone_size();
                if best.is_none_or(|(_, bw)| w < bw) {
                    best = Some((i, w));
                }
            }
        }
        best.map(|(i, _)| i)
    }

    /// Keeps terms with `|T_M| <= bound` and no block holding more than `ceil(ell/2)`
    /// positive literals (such terms vanish on the whole support).
    pub fn truncate_monotone(&self, bound: usize, ell: usize) -> Dnf {
        let half = ell.div_ceil(2) as u32;
        Dnf::new(
            self.terms
                .iter()
                .filter(|t| t.monotone_size() <= bound)
                .filter(|t| t.pos.iter().all(|m| m.count_ones() <= half))
                .cloned()
                .collect(),
        )
    }
}

impl fmt::Display for Dnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_dnf(self))
    }
}

impl std::str::FromStr for Dnf {
    type Err = DnfError;

    fn from_str(s: &str) -> Result<Self, DnfError> {
        parse_dnf(s)
    }
}

impl FromIterator<Term> for Dnf {
    fn from_iter<I: IntoIterator<Item = Term>>(iter: I) -> Self {
        Dnf::new(iter.into_iter().collect())
    }
}
