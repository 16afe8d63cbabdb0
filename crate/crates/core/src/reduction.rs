//! The set-cover distinguisher: run a learner on `(Γ_ℓ, D_ℓ)` and answer from the error it
//! reaches, with an optional hypothesis-size gate before the error is measured.

use std::fmt;

use num::{BigInt, BigRational};
use serde_json::{json, Value};
use thiserror::Error;

use crate::construction::{ConstructionError, LiftedDistribution, DEFAULT_BUDGET};
use crate::dnf::Dnf;
use crate::learners::{default_sample_size, Learner, LearnerBudget, LearnerError, SampleOracle};
use crate::oracle::{Oracle, OracleError};
use crate::rational::fmt_ratio;
use crate::sampler::draw_indexed;
use crate::setcover::SetCoverInstance;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("invalid parameters: {0}")]
    BadParams(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistanceMode {
    /// Exact distance over the enumerated support, capped at `budget` points.
    Exact { budget: u64 },
    /// Empirical disagreement over `count` fresh draws.
    Sampled { count: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionParams {
    pub ell: usize,
    pub step_budget: u64,
    /// Draws handed to the learner; `None` uses [`default_sample_size`].
    pub examples: Option<u64>,
    pub seed: u64,
    pub eta_threshold: BigRational,
    pub size_cap: Option<u64>,
    pub distance_mode: DistanceMode,
}

impl ReductionParams {
    /// Threshold `1/(16N)`, exact distance, no size gate.
    pub fn new(inst: &SetCoverInstance, ell: usize) -> Self {
        ReductionParams {
            ell,
            step_budget: 1_000_000_000,
            examples: None,
            seed: 0,
            eta_threshold: threshold_vertices(inst),
            size_cap: None,
            distance_mode: DistanceMode::Exact {
                budget: DEFAULT_BUDGET,
            },
        }
    }

    fn validate(&self) -> Result<(), ReductionError> {
        let zero = BigRational::from_integer(0.into());
        let one = BigRational::from_integer(1.into());
        if self.eta_threshold <= zero || self.eta_threshold >= one {
            return Err(ReductionError::BadParams(
                "threshold must lie in (0,1)".into(),
            ));
        }
        if self.step_budget == 0 {
            return Err(ReductionError::BadParams(
                "step budget must be positive".into(),
            ));
        }
        if let DistanceMode::Sampled { count: 0, .. } = self.distance_mode {
            return Err(ReductionError::BadParams(
                "sample count must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// `1/(16N)` with `N = n + |U|`.
pub fn threshold_vertices(inst: &SetCoverInstance) -> BigRational {
    BigRational::new(1.into(), BigInt::from(16 * inst.vertex_count()))
}

/// `1/(16n)`.
pub fn threshold_sets(inst: &SetCoverInstance) -> BigRational {
    BigRational::new(1.into(), BigInt::from(16 * inst.n()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    Yes,
    No,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reason {
    EtaBelowThreshold,
    EtaAboveThreshold,
    StepBudgetExceeded,
    SizeCapExceeded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaEstimate {
    pub value: BigRational,
    /// Hoeffding radius at confidence 2/3.
    pub radius: f64,
    pub low_power: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Eta {
    Exact(BigRational),
    Estimate(EtaEstimate),
}

impl Eta {
    pub fn value(&self) -> &BigRational {
        match self {
            Eta::Exact(v) => v,
            Eta::Estimate(e) => &e.value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub answer: Answer,
    pub reason: Reason,
    pub eta: Option<Eta>,
    pub hypothesis: Option<Dnf>,
    pub steps_used: u64,
}

impl Verdict {
    pub fn hypothesis_size(&self) -> Option<usize> {
        self.hypothesis.as_ref().map(Dnf::size)
    }

    pub fn to_json(&self) -> Value {
        let eta = match &self.eta {
            None => Value::Null,
            Some(Eta::Exact(v)) => json!({"exact": fmt_ratio(v)}),
            Some(Eta::Estimate(e)) => json!({
                "estimate": fmt_ratio(&e.value),
                "radius": e.radius,
                "low_power": e.low_power,
            }),
        };
        json!({
            "answer": self.answer.to_string(),
            "reason": format!("{:?}", self.reason),
            "eta": eta,
            "hypothesis_size": self.hypothesis_size(),
            "steps_used": self.steps_used,
        })
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "Yes",
            Answer::No => "No",
        })
    }
}

/// Disagreement frequency of `f` over `count` draws, with its Hoeffding radius
/// `sqrt(ln 6 / (2·count))`.
pub fn eta_sampled(dist: &LiftedDistribution, f: &Dnf, count: u64, seed: u64) -> EtaEstimate {
    assert!(count >= 1, "count must be positive");
    let wrong = (0..count)
        .filter(|&i| {
            let y = draw_indexed(dist, seed, i).output;
            f.accepts(&y) != dist.gamma(&y).expect("draws are on the support")
        })
        .count() as u64;
    let radius = (6f64.ln() / (2.0 * count as f64)).sqrt();
    EtaEstimate {
        value: BigRational::new(wrong.into(), count.into()),
        radius,
        low_power: radius >= 0.5,
    }
}

fn run(
    inst: &SetCoverInstance,
    learner: &dyn Learner,
    params: &ReductionParams,
) -> Result<Verdict, ReductionError> {
    params.validate()?;
    let dist = LiftedDistribution::new(inst.clone(), params.ell)?;
    let mut oracle = SampleOracle::new(&dist, params.seed);
    let budget = LearnerBudget {
        examples: params
            .examples
            .unwrap_or_else(|| default_sample_size(&dist)),
        steps: params.step_budget,
    };
    let out = learner.learn(&mut oracle, &budget)?;
    let Some(f) = out.hypothesis else {
        return Ok(Verdict {
            answer: Answer::No,
            reason: Reason::StepBudgetExceeded,
            eta: None,
            hypothesis: None,
            steps_used: out.steps_used,
        });
    };
    if let Some(cap) = params.size_cap {
        if f.size() as u64 > cap {
            return Ok(Verdict {
                answer: Answer::No,
                reason: Reason::SizeCapExceeded,
                eta: None,
                hypothesis: Some(f),
                steps_used: out.steps_used,
            });
        }
    }
    let eta = match params.distance_mode {
        DistanceMode::Exact { budget } => {
            Eta::Exact(Oracle::new(dist.clone(), budget)?.dist_exact(&f)?.dist)
        }
        DistanceMode::Sampled { count, seed } => Eta::Estimate(eta_sampled(&dist, &f, count, seed)),
    };
    let yes = *eta.value() <= params.eta_threshold;
    Ok(Verdict {
        answer: if yes { Answer::Yes } else { Answer::No },
        reason: if yes {
            Reason::EtaBelowThreshold
        } else {
            Reason::EtaAboveThreshold
        },
        eta: Some(eta),
        hypothesis: Some(f),
        steps_used: out.steps_used,
    })
}

/// Learn, then answer Yes iff the measured error is at most the threshold. A size cap in
/// `params` is applied between the two steps.
pub fn algorithm_b(
    inst: &SetCoverInstance,
    learner: &dyn Learner,
    params: &ReductionParams,
) -> Result<Verdict, ReductionError> {
    run(inst, learner, params)
}

/// [`algorithm_b`] with a mandatory size cap: `|F| > cap` answers No without measuring.
pub fn algorithm_b_proper(
    inst: &SetCoverInstance,
    learner: &dyn Learner,
    params: &ReductionParams,
) -> Result<Verdict, ReductionError> {
    if params.size_cap.is_none() {
        return Err(ReductionError::BadParams(
            "proper mode needs a size cap".into(),
        ));
    }
    run(inst, learner, params)
}

/// `2^{5k}`, the proper-mode cap for a gap parameter `k`.
pub fn proper_size_cap(k: u32) -> Option<u64> {
    1u64.checked_shl(5 * k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{CappedGreedyLearner, JuntaLearner};
    use crate::oracle::Oracle;
    use crate::rational::ratio;

    fn inst(n: usize, elems: &[&str]) -> SetCoverInstance {
        SetCoverInstance::from_bit_strings(n, elems).unwrap()
    }

    #[test]
    fn thresholds() {
        let i = inst(2, &["01", "10"]);
        assert_eq!(threshold_vertices(&i), ratio(1, 64));
        assert_eq!(threshold_sets(&i), ratio(1, 32));
    }

    #[test]
    fn junta_yes_and_greedy_no() {
        let i = inst(2, &["01", "10"]);
        let p = ReductionParams::new(&i, 3);
        let v = algorithm_b(&i, &JuntaLearner { m: 6 }, &p).unwrap();
        assert_eq!(v.answer, Answer::Yes);
        assert_eq!(v.eta, Some(Eta::Exact(ratio(0, 1))));
        let v2 = algorithm_b(&i, &JuntaLearner { m: 6 }, &p).unwrap();
        assert_eq!(v, v2);
        let v = algorithm_b(&i, &CappedGreedyLearner { cap: 1 }, &p).unwrap();
        assert_eq!(
            (v.answer, v.reason),
            (Answer::No, Reason::EtaAboveThreshold)
        );
    }

    #[test]
    fn step_budget_one() {
        let i = inst(2, &["01", "10"]);
        let mut p = ReductionParams::new(&i, 3);
        p.step_budget = 1;
        let v = algorithm_b(&i, &JuntaLearner { m: 6 }, &p).unwrap();
        assert_eq!(
            (v.answer, v.reason),
            (Answer::No, Reason::StepBudgetExceeded)
        );
        assert!(v.eta.is_none());
    }

    #[test]
    fn size_gate_precedes_eta() {
        let i = inst(2, &["01", "10"]);
        let mut p = ReductionParams::new(&i, 3);
        assert!(algorithm_b_proper(&i, &JuntaLearner { m: 6 }, &p).is_err());
        let f = algorithm_b(&i, &JuntaLearner { m: 6 }, &p)
            .unwrap()
            .hypothesis
            .unwrap();
        p.size_cap = Some(f.size() as u64 - 1);
        let v = algorithm_b_proper(&i, &JuntaLearner { m: 6 }, &p).unwrap();
        assert_eq!((v.answer, v.reason), (Answer::No, Reason::SizeCapExceeded));
        assert!(v.eta.is_none());
        p.size_cap = Some(f.size() as u64);
        let v = algorithm_b_proper(&i, &JuntaLearner { m: 6 }, &p).unwrap();
        assert_eq!(v.answer, Answer::Yes);
    }

    #[test]
    fn sampled_eta() {
        let i = inst(2, &["01", "10"]);
        let d = LiftedDistribution::new(i.clone(), 3).unwrap();
        let target = d
            .monotone_junta_form(crate::setcover::SetSelection::from_indices([1, 2]))
            .unwrap();
        let e = eta_sampled(&d, &target, 500, 1);
        assert_eq!(e.value, ratio(0, 1));
        let e = eta_sampled(&d, &target, 1, 1);
        assert!(e.low_power && e.radius >= 0.5);
    }

    #[test]
    fn sampled_eta_within_radius_mostly() {
        let i = inst(2, &["01", "10"]);
        let d = LiftedDistribution::new(i, 3).unwrap();
        let f: Dnf = "+1.1 +2.1".parse().unwrap();
        let exact = crate::rational::to_f64(
            &Oracle::new(d.clone(), DEFAULT_BUDGET)
                .unwrap()
                .dist_exact(&f)
                .unwrap()
                .dist,
        );
        let inside = (0..100u64)
            .filter(|&seed| {
                let e = eta_sampled(&d, &f, 400, seed);
                (crate::rational::to_f64(&e.value) - exact).abs() <= e.radius
            })
            .count();
        assert!(inside >= 67, "{inside}");
    }

    #[test]
    fn proper_cap_values() {
        assert_eq!(proper_size_cap(1), Some(32));
        assert_eq!(proper_size_cap(13), None);
    }
}
