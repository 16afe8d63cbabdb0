//! Exact distances and expectations over the lifted support, and brute-force checkers for
//! the claims and lemmas about `(Γ_ℓ, D_ℓ)`.

mod claims;
mod falsify;

use num::{BigInt, BigRational};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::construction::{ConstructionError, LiftedDistribution};
use crate::dnf::{Dnf, DnfError};
use crate::point::LiftedPoint;
use crate::rational::fmt_ratio;
use crate::setcover::{opt_exact, CoverSolution};

pub use claims::{
    check_term_tail, term_tail_enumerated, CoorAReport, CoorReport, JklReport, PopReport,
    TermTailReport, TruncateReport,
};
pub use falsify::{
    ternary_gray, Coverage, FalsifyReport, LemmaVariant, Strategy, Verdict as LemmaVerdict,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Dnf(#[from] DnfError),
    #[error("no Top point satisfies the hypothesis")]
    EmptyOmega,
    #[error("this check needs ell >= 5")]
    LemmaRequiresEll5,
    #[error("block length {0} must be odd and at least 3")]
    BadEll(usize),
    #[error("hypothesis size {size} is not below 2^({exponent})")]
    SizePreconditionViolated { size: usize, exponent: String },
    #[error("bad block counts: {0}")]
    BadCounts(String),
    #[error("{0} is not a Top point")]
    NotTop(String),
    #[error("hypothesis rejects {0}")]
    NotAccepted(String),
    #[error("minimum cover size {0} is below 2")]
    OptTooSmall(usize),
    #[error("term {term} has monotone size {size}, budget is {budget}")]
    MonotoneSizeTooLarge {
        term: usize,
        size: usize,
        budget: String,
    },
    #[error("expected monotone width {expectation} exceeds {bound}")]
    ExpectationTooLarge { expectation: String, bound: String },
    #[error("distance {0} exceeds 1/4")]
    DistTooLarge(String),
    #[error("hypothesis size {0} is below 2")]
    SizeTooSmall(usize),
    #[error("search needs {needed} candidates, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("invalid search parameter: {0}")]
    BadStrategy(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistReport {
    pub dist: BigRational,
    /// `Pr[F ≠ Γ_ℓ | Γ_ℓ = 1]`.
    pub err_given_1: BigRational,
    /// `Pr[F ≠ Γ_ℓ | Γ_ℓ = 0]`.
    pub err_given_0: BigRational,
    pub support_size: u128,
    pub top_errors: u64,
    pub bottom_errors: u64,
}

impl DistReport {
    pub fn to_json(&self) -> Value {
        json!({
            "dist": fmt_ratio(&self.dist),
            "err_given_1": fmt_ratio(&self.err_given_1),
            "err_given_0": fmt_ratio(&self.err_given_0),
            "support_size": self.support_size.to_string(),
        })
    }
}

/// An instance, a block length and the fully enumerated support, with `opt(S)` solved.
#[derive(Debug, Clone)]
pub struct Oracle {
    dist: LiftedDistribution,
    opt: CoverSolution,
    top: Vec<LiftedPoint>,
    bottom: Vec<LiftedPoint>,
}

impl Oracle {
    pub fn new(dist: LiftedDistribution, budget: u64) -> Result<Self, OracleError> {
        dist.check_budget(budget)?;
        let opt = opt_exact(dist.instance());
        let top = dist.top_points().collect();
        let bottom = dist.bottom_points().collect();
        Ok(Oracle {
            dist,
            opt,
            top,
            bottom,
        })
    }

    pub fn distribution(&self) -> &LiftedDistribution {
        &self.dist
    }

    pub fn opt(&self) -> usize {
        self.opt.size
    }

    pub fn cover(&self) -> &CoverSolution {
        &self.opt
    }

    pub fn ell(&self) -> usize {
        self.dist.ell()
    }

    pub fn n(&self) -> usize {
        self.dist.n()
    }

    pub fn universe_size(&self) -> usize {
        self.dist.instance().universe_size()
    }

    /// `Δ^1_n` in enumeration order.
    pub fn top(&self) -> &[LiftedPoint] {
        &self.top
    }

    /// `Δ^0_n`, cell by cell.
    pub fn bottom(&self) -> &[LiftedPoint] {
        &self.bottom
    }

    /// `opt(S)·ℓ` as an exact rational over `denom`.
    pub(crate) fn opt_ell_over(&self, denom: u64) -> BigRational {
        BigRational::new(BigInt::from(self.opt() * self.ell()), BigInt::from(denom))
    }

    /// `1/(8|U|)`.
    pub fn pop_bound(&self) -> BigRational {
        BigRational::new(1.into(), BigInt::from(8 * self.universe_size()))
    }

    /// `1/(2|U|)`.
    pub fn coor_bound(&self) -> BigRational {
        BigRational::new(1.into(), BigInt::from(2 * self.universe_size()))
    }

    fn check_hypothesis(&self, f: &Dnf) -> Result<(), OracleError> {
        Ok(f.check_bounds(self.n(), self.ell())?)
    }

    /// Disagreement counts `(Top points F rejects, Bottom points F accepts)`.
    pub fn error_counts(&self, f: &Dnf) -> Result<(u64, u64), OracleError> {
        self.check_hypothesis(f)?;
        let top = self.top.par_iter().filter(|y| !f.accepts(y)).count() as u64;
        let bottom = self.bottom.par_iter().filter(|y| f.accepts(y)).count() as u64;
        Ok((top, bottom))
    }

    /// Builds the report from disagreement counts.
    pub fn report_from_counts(&self, top_errors: u64, bottom_errors: u64) -> DistReport {
        let err_given_1 = BigRational::new(top_errors.into(), (self.top.len() as u64).into());
        let err_given_0 = BigRational::new(bottom_errors.into(), (self.bottom.len() as u64).into());
        let half = BigRational::new(1.into(), 2.into());
        DistReport {
            dist: &half * &err_given_1 + &half * &err_given_0,
            err_given_1,
            err_given_0,
            support_size: (self.top.len() + self.bottom.len()) as u128,
            top_errors,
            bottom_errors,
        }
    }

    /// `dist_{D_ℓ}(F, Γ_ℓ)`, exact.
    pub fn dist_exact(&self, f: &Dnf) -> Result<DistReport, OracleError> {
        let (t, b) = self.error_counts(f)?;
        Ok(self.report_from_counts(t, b))
    }

    /// `Ω = Δ^1_n ∩ F^{-1}(1)`.
    pub fn omega<'a>(&'a self, f: &'a Dnf) -> impl Iterator<Item = &'a LiftedPoint> + 'a {
        self.top.iter().filter(move |y| f.accepts(y))
    }

    /// `(|Ω|, Σ_{z∈Ω} mwidth_F(z))`.
    pub fn omega_width_sum(&self, f: &Dnf) -> Result<(u64, u64), OracleError> {
        self.check_hypothesis(f)?;
        Ok(self
            .top
            .par_iter()
            .filter(|y| f.accepts(y))
            .map(|y| (1u64, f.mwidth(y) as u64))
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1)))
    }

    /// `E_{z∼U(Ω)}[mwidth_F(z)]`, exact.
    pub fn expected_mwidth_omega(&self, f: &Dnf) -> Result<BigRational, OracleError> {
        let (count, sum) = self.omega_width_sum(f)?;
        if count == 0 {
            return Err(OracleError::EmptyOmega);
        }
        Ok(BigRational::new(sum.into(), count.into()))
    }
}

/// One-shot distance for a single hypothesis.
pub fn dist_exact(
    dist: &LiftedDistribution,
    f: &Dnf,
    budget: u64,
) -> Result<DistReport, OracleError> {
    Oracle::new(dist.clone(), budget)?.dist_exact(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::DEFAULT_BUDGET;
    use crate::rational::ratio;
    use crate::setcover::{SetCoverInstance, SetSelection};

    fn oracle(n: usize, elems: &[&str], ell: usize) -> Oracle {
        let inst = SetCoverInstance::from_bit_strings(n, elems).unwrap();
        Oracle::new(LiftedDistribution::new(inst, ell).unwrap(), DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn dist_examples() {
        let o = oracle(3, &["110", "101"], 3);
        let f = o
            .distribution()
            .monotone_junta_form(SetSelection::from_indices([2, 3]))
            .unwrap();
        assert_eq!(o.dist_exact(&f).unwrap().dist, ratio(0, 1));
        let r = o.dist_exact(&Dnf::empty()).unwrap();
        assert_eq!(r.dist, ratio(1, 2));
        assert_eq!(r.err_given_1, ratio(1, 1));
        let r = o.dist_exact(&Dnf::constant_one()).unwrap();
        assert_eq!(r.dist, ratio(1, 2));
        assert_eq!(r.err_given_0, ratio(1, 1));
        assert_eq!(r.support_size, 27 + 2 * 27);
    }

    #[test]
    fn dist_rejects_out_of_range_literals() {
        let o = oracle(1, &["0"], 3);
        let f: Dnf = "+2.1".parse().unwrap();
        assert!(matches!(o.dist_exact(&f), Err(OracleError::Dnf(_))));
    }

    #[test]
    fn mwidth_expectation_examples() {
        let o = oracle(2, &["01", "10"], 5);
        assert_eq!(
            o.expected_mwidth_omega(&Dnf::constant_one()).unwrap(),
            ratio(0, 1)
        );
        let f = o
            .distribution()
            .monotone_junta_form(SetSelection::from_indices([1, 2]))
            .unwrap();
        assert_eq!(o.expected_mwidth_omega(&f).unwrap(), ratio(6, 1));
        assert_eq!(
            o.expected_mwidth_omega(&Dnf::empty()),
            Err(OracleError::EmptyOmega)
        );
    }
}
