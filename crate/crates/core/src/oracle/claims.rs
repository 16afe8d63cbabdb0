use std::cmp::Ordering;

use num::{BigInt, BigRational, One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{Oracle, OracleError};
use crate::combinadic::{binomial, FixedWeight};
use crate::dnf::Dnf;
use crate::point::LiftedPoint;
use crate::rational::{cmp_pow2, fmt_ratio, le_pow2};
use crate::sampler::{one_positions, substitute};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermTailReport {
    /// `∏ C(ℓ-b_i, ⌈ℓ/2⌉-b_i) / C(ℓ, ⌈ℓ/2⌉)`.
    pub probability: BigRational,
    /// `Σ b_i`; the bound is `2^{-total/2}`.
    pub total: u32,
    pub pass: bool,
}

impl TermTailReport {
    pub fn to_json(&self) -> Value {
        json!({
            "probability": fmt_ratio(&self.probability),
            "bound": format!("2^(-{}/2)", self.total),
            "pass": self.pass,
        })
    }
}

fn check_counts(ell: usize, counts: &[u32]) -> Result<u32, OracleError> {
    if ell < 3 || ell.is_multiple_of(2) || ell > crate::point::MAX_ELL {
        return Err(OracleError::BadEll(ell));
    }
    let half = ell.div_ceil(2) as u32;
    if let Some(b) = counts.iter().find(|&&b| b > half) {
        return Err(OracleError::BadCounts(format!("{b} exceeds {half}")));
    }
    Ok(half)
}

/// Probability that a uniform point of `(Δ^1)^n` satisfies a monotone term with `b_i`
/// positive literals in block `i`, against `2^{-Σb/2}`.
pub fn check_term_tail(ell: usize, counts: &[u32]) -> Result<TermTailReport, OracleError> {
    let half = check_counts(ell, counts)?;
    if ell < 5 {
        return Err(OracleError::LemmaRequiresEll5);
    }
    let all = binomial(ell as u64, half as u64);
    let probability = counts
        .iter()
        .map(|&b| {
            BigRational::new(
                binomial((ell as u32 - b) as u64, (half - b) as u64).into(),
                all.into(),
            )
        })
        .fold(BigRational::one(), |acc, p| acc * p);
    let total: u32 = counts.iter().sum();
    // p <= 2^{-t/2}  iff  p^2 * 2^t <= 1
    let lhs = &probability * &probability * BigRational::from_integer(BigInt::one() << total);
    Ok(TermTailReport {
        pass: lhs <= BigRational::one(),
        probability,
        total,
    })
}

/// The same probability by counting over `(Δ^1)^n`, using the first `b_i` positions of each
/// block as the term's literals.
pub fn term_tail_enumerated(ell: usize, counts: &[u32]) -> Result<BigRational, OracleError> {
    let half = check_counts(ell, counts)?;
    let slice = binomial(ell as u64, half as u64) as usize;
    let radices = vec![slice; counts.len()];
    let blocks: Vec<Vec<u64>> = counts
        .iter()
        .map(|_| FixedWeight::new(ell as u32, half).collect())
        .collect();
    let mut hits = 0u64;
    let mut total = 0u64;
    for idx in crate::combinadic::odometer(&radices) {
        total += 1;
        if idx.iter().enumerate().all(|(i, &k)| {
            let need = (1u64 << counts[i]) - 1;
            blocks[i][k] & need == need
        }) {
            hits += 1;
        }
    }
    Ok(BigRational::new(hits.into(), total.into()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncateReport {
    /// Monotone size bound `⌊opt·ℓ/5⌋`.
    pub bound: usize,
    pub truncated: Dnf,
    pub dist_before: BigRational,
    pub dist_after: BigRational,
    /// Slack exponent `opt·ℓ/20`; the allowed increase is `2^{-slack}`.
    pub slack: BigRational,
    pub holds: bool,
}

impl TruncateReport {
    pub fn to_json(&self) -> Value {
        json!({
            "bound": self.bound,
            "size_after": self.truncated.size(),
            "dist_before": fmt_ratio(&self.dist_before),
            "dist_after": fmt_ratio(&self.dist_after),
            "slack": format!("2^(-{})", fmt_ratio(&self.slack)),
            "holds": self.holds,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoorReport {
    pub hits: u64,
    pub paths: u64,
    pub probability: BigRational,
    pub threshold: BigRational,
    pub pass: bool,
}

impl CoorReport {
    pub fn to_json(&self) -> Value {
        json!({
            "hits": self.hits,
            "paths": self.paths,
            "probability": fmt_ratio(&self.probability),
            "threshold": fmt_ratio(&self.threshold),
            "pass": self.pass,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoorAReport {
    pub expectation: BigRational,
    pub probability: BigRational,
    pub threshold: BigRational,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PopReport {
    pub expectation: BigRational,
    pub dist: BigRational,
    pub bound: BigRational,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JklReport {
    pub expectation: BigRational,
    pub size: usize,
    pub dist: BigRational,
    /// `E ≤ 4·log₂|F|`, decided as `2^{E/4} ≤ |F|`.
    pub pass: bool,
}

impl Oracle {
    fn require_ell5(&self) -> Result<(), OracleError> {
        if self.ell() < 5 {
            Err(OracleError::LemmaRequiresEll5)
        } else {
            Ok(())
        }
    }

    /// Truncation at monotone size `⌊opt·ℓ/5⌋` and the inequality
    /// `dist(F') ≤ dist(F) + 2^{-opt·ℓ/20}`, without the size precondition.
    pub fn check_truncate_inequality(&self, f: &Dnf) -> Result<TruncateReport, OracleError> {
        self.require_ell5()?;
        let bound = self.opt() * self.ell() / 5;
        let truncated = f.truncate_monotone(bound, self.ell());
        let dist_before = self.dist_exact(f)?.dist;
        let dist_after = self.dist_exact(&truncated)?.dist;
        let slack = self.opt_ell_over(20);
        let holds = le_pow2(&(&dist_after - &dist_before), &-slack.clone());
        Ok(TruncateReport {
            bound,
            truncated,
            dist_before,
            dist_after,
            slack,
            holds,
        })
    }

    /// [`Oracle::check_truncate_inequality`] under the precondition `|F| < 2^{opt·ℓ/20}`.
    pub fn check_truncate(&self, f: &Dnf) -> Result<TruncateReport, OracleError> {
        self.require_ell5()?;
        let exponent = self.opt_ell_over(20);
        let size = BigRational::from_integer(f.size().into());
        if f.size() > 0 && cmp_pow2(&size, &exponent) != Ordering::Less {
            return Err(OracleError::SizePreconditionViolated {
                size: f.size(),
                exponent: fmt_ratio(&exponent),
            });
        }
        self.check_truncate_inequality(f)
    }

    /// `(hits, paths)` over `j ∈ one(z)`, `u ∈ U` for `F(z^{j←u}) = 1`.
    fn coor_counts(&self, f: &Dnf, z: &LiftedPoint) -> (u64, u64) {
        let universe = self.distribution().instance().universe();
        let one = one_positions(z).expect("Top blocks are nonempty");
        let mut hits = 0u64;
        let mut paths = 0u64;
        for j in one.iter() {
            for &u in universe {
                paths += 1;
                if f.accepts(&substitute(z, &j, u)) {
                    hits += 1;
                }
            }
        }
        (hits, paths)
    }

    /// `Pr_{j∼U(one(z)), y∼U(z^{j←U})}[F(y) = 1] ≥ 1/(2|U|)` when every term has
    /// `|T_M| ≤ ⌈ℓ/2⌉(opt-1)/2`.
    pub fn check_claim_coor(&self, f: &Dnf, z: &LiftedPoint) -> Result<CoorReport, OracleError> {
        self.check_hypothesis(f)?;
        if self.opt() < 2 {
            return Err(OracleError::OptTooSmall(self.opt()));
        }
        if self.distribution().classify(z) != crate::construction::SupportClass::Top {
            return Err(OracleError::NotTop(z.to_string()));
        }
        if !f.accepts(z) {
            return Err(OracleError::NotAccepted(z.to_string()));
        }
        let half = self.distribution().half();
        let doubled_budget = half * (self.opt() - 1);
        if let Some((term, t)) = f
            .terms()
            .iter()
            .enumerate()
            .find(|(_, t)| 2 * t.monotone_size() > doubled_budget)
        {
            return Err(OracleError::MonotoneSizeTooLarge {
                term,
                size: t.monotone_size(),
                budget: fmt_ratio(&BigRational::new(doubled_budget.into(), 2.into())),
            });
        }
        let (hits, paths) = self.coor_counts(f, z);
        let probability = BigRational::new(hits.into(), paths.into());
        let threshold = self.coor_bound();
        Ok(CoorReport {
            hits,
            paths,
            pass: probability >= threshold,
            probability,
            threshold,
        })
    }

    fn mwidth_precondition(&self, f: &Dnf) -> Result<BigRational, OracleError> {
        let expectation = self.expected_mwidth_omega(f)?;
        let bound = self.opt_ell_over(4);
        if expectation > bound {
            return Err(OracleError::ExpectationTooLarge {
                expectation: fmt_ratio(&expectation),
                bound: fmt_ratio(&bound),
            });
        }
        Ok(expectation)
    }

    /// `Pr_{z∼U(Ω), j∼U(one(z)), y∼U(z^{j←U})}[F(y) = 1] ≥ 1/(2|U|)` when
    /// `E_Ω[mwidth] ≤ opt·ℓ/4`.
    pub fn check_claim_coor_a(&self, f: &Dnf) -> Result<CoorAReport, OracleError> {
        let expectation = self.mwidth_precondition(f)?;
        let omega: Vec<&LiftedPoint> = self.omega(f).collect();
        let (hits, paths) = omega
            .par_iter()
            .map(|z| self.coor_counts(f, z))
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        // every z contributes the same number of paths, so pooling is the uniform average
        let probability = BigRational::new(hits.into(), paths.into());
        let threshold = self.coor_bound();
        Ok(CoorAReport {
            expectation,
            pass: probability >= threshold,
            probability,
            threshold,
        })
    }

    /// `dist(F, Γ_ℓ) ≥ 1/(8|U|)` when `E_Ω[mwidth] ≤ opt·ℓ/4`.
    pub fn check_claim_pop(&self, f: &Dnf) -> Result<PopReport, OracleError> {
        let expectation = self.mwidth_precondition(f)?;
        let dist = self.dist_exact(f)?.dist;
        let bound = self.pop_bound();
        Ok(PopReport {
            expectation,
            pass: dist >= bound,
            dist,
            bound,
        })
    }

    /// `E_Ω[mwidth] ≤ 4·log₂|F|` when `dist ≤ 1/4` and `|F| ≥ 2`.
    pub fn check_claim_jkl(&self, f: &Dnf) -> Result<JklReport, OracleError> {
        if f.size() < 2 {
            return Err(OracleError::SizeTooSmall(f.size()));
        }
        let dist = self.dist_exact(f)?.dist;
        if dist > BigRational::new(1.into(), 4.into()) {
            return Err(OracleError::DistTooLarge(fmt_ratio(&dist)));
        }
        let expectation = self.expected_mwidth_omega(f)?;
        let quarter = &expectation / BigRational::from_integer(4.into());
        let size = BigRational::from_integer(f.size().into());
        let pass = expectation.is_zero()
            || (!expectation.is_negative() && cmp_pow2(&size, &quarter) != Ordering::Less);
        Ok(JklReport {
            expectation,
            size: f.size(),
            dist,
            pass,
        })
    }
}
