//! The base pair `(Γ, D)` over `{0,1}^n` and its majority lift `(Γ_ℓ, D_ℓ)` over
//! `({0,1}^ℓ)^n`, with exact masses.
//!
//! The lifted support has two halves. `Top` is every point whose blocks all have weight
//! `⌈ℓ/2⌉`. `Bottom(u)` is every point whose block `i` has weight `⌈ℓ/2⌉` when
//! `u_i = 1` and `⌊ℓ/2⌋` when `u_i = 0`, for a universe element `u`. Each half carries
//! mass 1/2, spread uniformly.

use num::{BigInt, BigRational, One, Zero};
use thiserror::Error;

use crate::combinadic::{binomial, ones, FixedWeight};
use crate::dnf::{Dnf, Term};
use crate::point::{LiftedPoint, Var, MAX_ELL};
use crate::setcover::{format_bits, SetCoverInstance, SetSelection};

/// Default cap on enumerated support points.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("block length {0} must be odd and in 3..={MAX_ELL}")]
    BadEll(usize),
    #[error("point {0} is off the support")]
    OffSupport(String),
    #[error("enumeration needs {needed} points, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("{0} is not a set cover")]
    NotACover(SetSelection),
    #[error("point shape (n = {n}, ell = {ell}) does not match the construction")]
    ShapeMismatch { n: usize, ell: usize },
    #[error("set index out of range: {0}")]
    SelectionOutOfRange(SetSelection),
}

/// `Γ(x)`: 1 at `1^n`, 0 on the universe, undefined elsewhere.
pub fn gamma_base(inst: &SetCoverInstance, x: u64) -> Result<bool, ConstructionError> {
    if x == inst.full() {
        Ok(true)
    } else if inst.contains(x) {
        Ok(false)
    } else {
        Err(ConstructionError::OffSupport(format_bits(x, inst.n())))
    }
}

/// `D(x)`: 1/2 at `1^n`, `1/(2|U|)` per universe element, 0 elsewhere.
pub fn base_pmf(inst: &SetCoverInstance, x: u64) -> BigRational {
    if x == inst.full() {
        BigRational::new(1.into(), 2.into())
    } else if inst.contains(x) {
        BigRational::new(1.into(), (2 * inst.universe_size()).into())
    } else {
        BigRational::zero()
    }
}

/// Distance under `D` between `Γ` and the conjunction of the selected coordinates; the
/// selection is a cover exactly when this is zero.
pub fn base_conjunction_dist(inst: &SetCoverInstance, sel: SetSelection) -> BigRational {
    let conj = |x: u64| x & sel.0 == sel.0;
    std::iter::once(inst.full())
        .chain(inst.universe().iter().copied())
        .filter(|&x| conj(x) != gamma_base(inst, x).expect("support point"))
        .map(|x| base_pmf(inst, x))
        .sum()
}

pub fn check_factopt(inst: &SetCoverInstance, sel: SetSelection) -> bool {
    base_conjunction_dist(inst, sel).is_zero()
}

/// Bit `i` is 1 iff block `i` has weight above `ℓ/2`.
pub fn majority_decode(y: &LiftedPoint) -> u64 {
    let ell = y.ell() as u32;
    y.blocks()
        .iter()
        .enumerate()
        .filter(|(_, b)| 2 * b.count_ones() > ell)
        .fold(0, |m, (i, _)| m | 1 << i)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SupportClass {
    Top,
    /// Bottom cell of the universe element.
    Bottom(u64),
    Off,
}

/// The lifted target and distribution for one instance and odd block length.
#[derive(Debug, Clone)]
pub struct LiftedDistribution {
    inst: SetCoverInstance,
    ell: usize,
    upper: Vec<u64>,
    lower: Vec<u64>,
}

impl LiftedDistribution {
    pub fn new(inst: SetCoverInstance, ell: usize) -> Result<Self, ConstructionError> {
        if ell < 3 || ell.is_multiple_of(2) || ell > MAX_ELL {
            return Err(ConstructionError::BadEll(ell));
        }
        let half = ell.div_ceil(2) as u32;
        Ok(LiftedDistribution {
            inst,
            ell,
            upper: FixedWeight::new(ell as u32, half).collect(),
            lower: FixedWeight::new(ell as u32, half - 1).collect(),
        })
    }

    pub fn instance(&self) -> &SetCoverInstance {
        &self.inst
    }

    pub fn n(&self) -> usize {
        self.inst.n()
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// `⌈ℓ/2⌉`.
    pub fn half(&self) -> usize {
        self.ell.div_ceil(2)
    }

    /// `|Δ^1| = |Δ^0| = C(ℓ, ⌊ℓ/2⌋)`.
    pub fn slice_size(&self) -> u64 {
        binomial(self.ell as u64, (self.ell / 2) as u64)
    }

    /// Block values of weight `⌈ℓ/2⌉`, ascending.
    pub fn upper_slice(&self) -> &[u64] {
        &self.upper
    }

    /// Block values of weight `⌊ℓ/2⌋`, ascending.
    pub fn lower_slice(&self) -> &[u64] {
        &self.lower
    }

    fn pow_slice(&self) -> Option<u128> {
        (self.slice_size() as u128).checked_pow(self.n() as u32)
    }

    pub fn top_count(&self) -> Option<u128> {
        self.pow_slice()
    }

    pub fn bottom_count(&self) -> Option<u128> {
        self.pow_slice()?
            .checked_mul(self.inst.universe_size() as u128)
    }

    pub fn support_size(&self) -> Option<u128> {
        self.top_count()?.checked_add(self.bottom_count()?)
    }

    pub fn check_budget(&self, budget: u64) -> Result<(), ConstructionError> {
        match self.support_size() {
            Some(s) if s <= budget as u128 => Ok(()),
            s => Err(ConstructionError::BudgetExceeded {
                needed: s.unwrap_or(u128::MAX),
                budget,
            }),
        }
    }

    fn slice_pow_big(&self) -> BigInt {
        num::pow(BigInt::from(self.slice_size()), self.n())
    }

    /// Mass of each Top point, `1/(2|Δ^1|^n)`.
    pub fn top_mass(&self) -> BigRational {
        BigRational::new(BigInt::one(), 2 * self.slice_pow_big())
    }

    /// Mass of each Bottom point, `1/(2|U||Δ^0|^n)`.
    pub fn bottom_mass(&self) -> BigRational {
        BigRational::new(
            BigInt::one(),
            2 * self.slice_pow_big() * BigInt::from(self.inst.universe_size()),
        )
    }

    fn shape_ok(&self, y: &LiftedPoint) -> bool {
        y.n() == self.n() && y.ell() == self.ell
    }

    pub fn classify(&self, y: &LiftedPoint) -> SupportClass {
        if !self.shape_ok(y) {
            return SupportClass::Off;
        }
        let half = self.half() as u32;
        let mut pattern = 0u64;
        for (i, w) in y.weights().into_iter().enumerate() {
            if w == half {
                pattern |= 1 << i;
            } else if w + 1 != half {
                return SupportClass::Off;
            }
        }
        debug_assert_eq!(pattern, majority_decode(y));
        if pattern == self.inst.full() {
            SupportClass::Top
        } else if self.inst.contains(pattern) {
            SupportClass::Bottom(pattern)
        } else {
            SupportClass::Off
        }
    }

    /// `Γ_ℓ(y)`: 1 on Top, 0 on Bottom.
    pub fn gamma(&self, y: &LiftedPoint) -> Result<bool, ConstructionError> {
        match self.classify(y) {
            SupportClass::Top => Ok(true),
            SupportClass::Bottom(_) => Ok(false),
            SupportClass::Off => Err(ConstructionError::OffSupport(y.to_string())),
        }
    }

    /// `D_ℓ(y)`, exact.
    pub fn pmf(&self, y: &LiftedPoint) -> BigRational {
        match self.classify(y) {
            SupportClass::Top => self.top_mass(),
            SupportClass::Bottom(_) => self.bottom_mass(),
            SupportClass::Off => BigRational::zero(),
        }
    }

    fn product<'a>(&'a self, choices: Vec<&'a [u64]>) -> impl Iterator<Item = LiftedPoint> + 'a {
        let radices: Vec<usize> = choices.iter().map(|c| c.len()).collect();
        let ell = self.ell;
        crate::combinadic::odometer(&radices)
            .collect::<Vec<_>>()
            .into_iter()
            .map(move |idx| {
                LiftedPoint::from_parts(
                    ell,
                    idx.iter()
                        .enumerate()
                        .map(|(i, &k)| choices[i][k])
                        .collect(),
                )
            })
    }

    /// `Δ^1_n` in product order (block 1 slowest).
    pub fn top_points(&self) -> impl Iterator<Item = LiftedPoint> + '_ {
        self.product(vec![self.upper.as_slice(); self.n()])
    }

    /// The Bottom cell `∏ Δ^{u_i}` of one element.
    pub fn cell_points(&self, u: u64) -> impl Iterator<Item = LiftedPoint> + '_ {
        let choices = (0..self.n())
            .map(|i| {
                if u >> i & 1 == 1 {
                    self.upper.as_slice()
                } else {
                    self.lower.as_slice()
                }
            })
            .collect();
        self.product(choices)
    }

    /// `Δ^0_n`, cell by cell in universe order.
    pub fn bottom_points(&self) -> impl Iterator<Item = LiftedPoint> + '_ {
        self.inst
            .universe()
            .iter()
            .flat_map(move |&u| self.cell_points(u))
    }

    /// Every support point once, with its mass.
    pub fn support(
        &self,
        budget: u64,
    ) -> Result<impl Iterator<Item = (LiftedPoint, BigRational)> + '_, ConstructionError> {
        self.check_budget(budget)?;
        let top = self.top_mass();
        let bottom = self.bottom_mass();
        Ok(self
            .top_points()
            .map(move |y| (y, top.clone()))
            .chain(self.bottom_points().map(move |y| (y, bottom.clone()))))
    }

    /// `∧_{i∈C} Majority(y_i)` as a monotone DNF: one term per choice of a
    /// `⌈ℓ/2⌉`-subset in each selected block.
    pub fn monotone_junta_form(&self, sel: SetSelection) -> Result<Dnf, ConstructionError> {
        self.inst
            .check_selection(sel)
            .map_err(|_| ConstructionError::SelectionOutOfRange(sel))?;
        if !self.inst.is_cover(sel) {
            return Err(ConstructionError::NotACover(sel));
        }
        let blocks: Vec<usize> = ones(sel.0).map(|t| t as usize).collect();
        let radices = vec![self.upper.len(); blocks.len()];
        let terms = crate::combinadic::odometer(&radices)
            .map(|idx| {
                let vars: Vec<Var> = blocks
                    .iter()
                    .zip(&idx)
                    .flat_map(|(&b, &k)| ones(self.upper[k]).map(move |t| Var::new(b, t as usize)))
                    .collect();
                Term::positive(&vars)
            })
            .collect();
        Ok(terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn inst(n: usize, elems: &[&str]) -> SetCoverInstance {
        SetCoverInstance::from_bit_strings(n, elems).unwrap()
    }

    fn pt(s: &str) -> LiftedPoint {
        s.parse().unwrap()
    }

    #[test]
    fn base_target() {
        let i = inst(3, &["110", "101"]);
        assert_eq!(gamma_base(&i, 0b111), Ok(true));
        assert_eq!(gamma_base(&i, 0b011), Ok(false)); // "110"
        assert_eq!(
            gamma_base(&i, 0),
            Err(ConstructionError::OffSupport("000".into()))
        );
        let total: BigRational = [0b111u64, 0b011, 0b101]
            .iter()
            .map(|&x| base_pmf(&i, x))
            .sum();
        assert_eq!(total, BigRational::one());
        assert_eq!(base_pmf(&i, 0b011), ratio(1, 4));
    }

    #[test]
    fn factopt_examples() {
        let i = inst(3, &["110", "101"]);
        assert!(check_factopt(&i, SetSelection::from_indices([2, 3])));
        assert!(!check_factopt(&i, SetSelection::from_indices([3])));
        assert!(check_factopt(&i, SetSelection::all(3)));
        assert_eq!(
            base_conjunction_dist(&i, SetSelection::default()),
            ratio(1, 2)
        );
    }

    #[test]
    fn classify_examples() {
        let d = LiftedDistribution::new(inst(2, &["01"]), 3).unwrap();
        assert_eq!(d.classify(&pt("110.011")), SupportClass::Top);
        assert_eq!(d.classify(&pt("100.110")), SupportClass::Bottom(0b10));
        assert_eq!(d.classify(&pt("111.110")), SupportClass::Off);
        // decodes to 10, which is not in U
        assert_eq!(d.classify(&pt("110.100")), SupportClass::Off);
        assert_eq!(d.classify(&pt("110")), SupportClass::Off);
    }

    #[test]
    fn gamma_and_pmf() {
        let d = LiftedDistribution::new(inst(2, &["01", "10"]), 3).unwrap();
        assert_eq!(d.gamma(&pt("110.011")), Ok(true));
        assert_eq!(d.gamma(&pt("100.110")), Ok(false));
        assert!(matches!(
            d.gamma(&pt("111.110")),
            Err(ConstructionError::OffSupport(_))
        ));
        assert_eq!(d.pmf(&pt("100.110")), ratio(1, 36));
        assert_eq!(d.pmf(&pt("110.011")), ratio(1, 18));
        assert_eq!(d.pmf(&pt("000.000")), BigRational::zero());
    }

    #[test]
    fn bad_ell() {
        for ell in [0, 1, 2, 4, 64, 65] {
            assert!(LiftedDistribution::new(inst(1, &["0"]), ell).is_err());
        }
    }

    #[test]
    fn support_of_single_block() {
        let d = LiftedDistribution::new(inst(1, &["0"]), 3).unwrap();
        let all: Vec<_> = d.support(DEFAULT_BUDGET).unwrap().collect();
        assert_eq!(all.len(), 6);
        let top: Vec<_> = all
            .iter()
            .filter(|(y, _)| d.classify(y) == SupportClass::Top)
            .collect();
        assert_eq!(top.len(), 3);
        assert!(all.iter().all(|(_, m)| *m == ratio(1, 6)));
        let total: BigRational = all.iter().map(|(_, m)| m.clone()).sum();
        assert_eq!(total, BigRational::one());
    }

    #[test]
    fn budget() {
        let d =
            LiftedDistribution::new(SetCoverInstance::from_vectors(8, &[0]).unwrap(), 5).unwrap();
        assert!(matches!(
            d.support(1_000_000).err(),
            Some(ConstructionError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn majority_examples() {
        assert_eq!(majority_decode(&pt("110.001")), 0b01);
        assert_eq!(majority_decode(&pt("11100")), 1);
        assert_eq!(majority_decode(&pt("000")), 0);
    }

    #[test]
    fn junta_form_shapes() {
        let d = LiftedDistribution::new(inst(1, &["0"]), 3).unwrap();
        let f = d
            .monotone_junta_form(SetSelection::from_indices([1]))
            .unwrap();
        assert_eq!(f.to_string(), "+1.1 +1.2 | +1.1 +1.3 | +1.2 +1.3");
        let d = LiftedDistribution::new(inst(2, &["01", "10"]), 3).unwrap();
        let f = d
            .monotone_junta_form(SetSelection::from_indices([1, 2]))
            .unwrap();
        assert_eq!(f.size(), 9);
        assert!(f
            .terms()
            .iter()
            .all(|t| t.monotone_size() == 4 && t.is_monotone()));
        assert_eq!(
            d.monotone_junta_form(SetSelection::from_indices([1])),
            Err(ConstructionError::NotACover(SetSelection::from_indices([
                1
            ])))
        );
    }

    #[test]
    fn junta_form_agrees_on_support() {
        let d = LiftedDistribution::new(inst(3, &["110", "101", "011"]), 3).unwrap();
        for mask in 0..8u64 {
            let sel = SetSelection(mask);
            match d.monotone_junta_form(sel) {
                Ok(f) => {
                    for (y, _) in d.support(DEFAULT_BUDGET).unwrap() {
                        assert_eq!(f.accepts(&y), d.gamma(&y).unwrap());
                    }
                }
                Err(e) => assert_eq!(e, ConstructionError::NotACover(sel)),
            }
        }
    }
}
