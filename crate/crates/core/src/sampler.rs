//! Point surgery and the two-phase sampler for `D_ℓ`.
//!
//! A draw flips a fair coin `ξ`, picks `w` uniformly from the Top support, and either
//! returns `w` (`ξ = 1`) or picks `j ∈ one(w)` and `u ∈ U` uniformly and returns `w^{j←u}`.

use std::collections::BTreeMap;

use num::{BigInt, BigRational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::combinadic::{ones, unrank_fixed_weight};
use crate::construction::{LiftedDistribution, SupportClass};
use crate::point::{IndexVector, LiftedPoint};
use crate::setcover::{format_bits, SetCoverInstance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SamplerError {
    #[error("block {0} has no ones")]
    EmptyBlock(usize),
    #[error("{0} is not a Top point")]
    NotTop(String),
    #[error("index vector {j} is not in one({z})")]
    NotInOne { j: IndexVector, z: String },
    #[error("index vector has {got} coordinates, point has {n} blocks")]
    IndexLength { got: usize, n: usize },
    #[error("path enumeration needs {needed} paths, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
}

/// The product set `one(z)`, one list of positions per block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OnePositions {
    per_block: Vec<Vec<u32>>,
}

impl OnePositions {
    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.per_block
    }

    /// `∏ wt(z_i)`.
    pub fn len(&self) -> u128 {
        self.per_block.iter().map(|b| b.len() as u128).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All index vectors in product order, first block slowest.
    pub fn iter(&self) -> impl Iterator<Item = IndexVector> + '_ {
        let radices: Vec<usize> = self.per_block.iter().map(Vec::len).collect();
        crate::combinadic::odometer(&radices)
            .collect::<Vec<_>>()
            .into_iter()
            .map(move |idx| {
                IndexVector(
                    idx.iter()
                        .enumerate()
                        .map(|(i, &k)| self.per_block[i][k])
                        .collect(),
                )
            })
    }
}

pub fn one_positions(z: &LiftedPoint) -> Result<OnePositions, SamplerError> {
    let per_block = z
        .blocks()
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            if b == 0 {
                Err(SamplerError::EmptyBlock(i))
            } else {
                Ok(ones(b).collect())
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(OnePositions { per_block })
}

/// `z^{j←a}`: bit `j_i` of block `i` set to `a_i`.
pub fn substitute(z: &LiftedPoint, j: &IndexVector, a: u64) -> LiftedPoint {
    assert_eq!(j.len(), z.n(), "index vector length must match the point");
    let blocks = z
        .blocks()
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let bit = 1u64 << j.get(i);
            assert!((j.get(i) as usize) < z.ell(), "index outside block");
            if a >> i & 1 == 1 {
                b | bit
            } else {
                b & !bit
            }
        })
        .collect();
    LiftedPoint::from_parts(z.ell(), blocks)
}

/// `w^{j←U}` in universe order, for `w` in the Top support and `j ∈ one(w)`.
pub fn substitute_universe(
    dist: &LiftedDistribution,
    w: &LiftedPoint,
    j: &IndexVector,
) -> Result<Vec<LiftedPoint>, SamplerError> {
    if dist.classify(w) != SupportClass::Top {
        return Err(SamplerError::NotTop(w.to_string()));
    }
    if j.len() != w.n() {
        return Err(SamplerError::IndexLength {
            got: j.len(),
            n: w.n(),
        });
    }
    if !j.is_one_of(w) {
        return Err(SamplerError::NotInOne {
            j: j.clone(),
            z: w.to_string(),
        });
    }
    Ok(dist
        .instance()
        .universe()
        .iter()
        .map(|&u| substitute(w, j, u))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplerTrace {
    pub xi: bool,
    pub w: LiftedPoint,
    pub j: Option<IndexVector>,
    pub u: Option<u64>,
    pub output: LiftedPoint,
}

/// One draw from `D_ℓ` through the two-phase procedure.
pub fn draw<R: Rng + ?Sized>(dist: &LiftedDistribution, rng: &mut R) -> SamplerTrace {
    let xi: bool = rng.gen();
    let slice = dist.slice_size();
    let ell = dist.ell() as u32;
    let half = dist.half() as u32;
    let w = LiftedPoint::from_parts(
        dist.ell(),
        (0..dist.n())
            .map(|_| unrank_fixed_weight(ell, half, rng.gen_range(0..slice)))
            .collect(),
    );
    if xi {
        return SamplerTrace {
            xi,
            output: w.clone(),
            w,
            j: None,
            u: None,
        };
    }
    let j = IndexVector(
        w.blocks()
            .iter()
            .map(|&b| ones(b).nth(rng.gen_range(0..half as usize)).unwrap())
            .collect(),
    );
    let universe = dist.instance().universe();
    let u = universe[rng.gen_range(0..universe.len())];
    SamplerTrace {
        xi,
        output: substitute(&w, &j, u),
        w,
        j: Some(j),
        u: Some(u),
    }
}

/// Generator for draw number `index` under `seed`; independent of any other draw.
pub fn draw_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draw number `index` under `seed`.
pub fn draw_indexed(dist: &LiftedDistribution, seed: u64, index: u64) -> SamplerTrace {
    draw(dist, &mut draw_rng(seed, index))
}

/// Number of `(ξ, w, j, u)` paths the exact enumeration visits.
pub fn path_count(dist: &LiftedDistribution) -> Option<u128> {
    let top = dist.top_count()?;
    let per_w = (dist.half() as u128)
        .checked_pow(dist.n() as u32)?
        .checked_mul(dist.instance().universe_size() as u128)?;
    top.checked_mul(per_w)?.checked_add(top)
}

/// Exact output distribution of the sampler, by enumerating every path, keyed by the
/// point's text form.
pub fn sampler_exact_pmf(
    dist: &LiftedDistribution,
    budget: u64,
) -> Result<BTreeMap<String, BigRational>, SamplerError> {
    match path_count(dist) {
        Some(p) if p <= budget as u128 => {}
        p => {
            return Err(SamplerError::BudgetExceeded {
                needed: p.unwrap_or(u128::MAX),
                budget,
            })
        }
    }
    let tops: Vec<LiftedPoint> = dist.top_points().collect();
    let merge = |mut a: BTreeMap<String, u64>, b: BTreeMap<String, u64>| {
        for (k, v) in b {
            *a.entry(k).or_insert(0) += v;
        }
        a
    };
    let bottom_counts = tops
        .par_iter()
        .map(|w| {
            let mut counts = BTreeMap::new();
            for j in one_positions(w).expect("Top blocks are nonempty").iter() {
                for &u in dist.instance().universe() {
                    *counts
                        .entry(substitute(w, &j, u).to_string())
                        .or_insert(0u64) += 1;
                }
            }
            counts
        })
        .reduce(BTreeMap::new, merge);

    let slice_pow = BigInt::from(dist.slice_size()).pow(dist.n() as u32);
    let half_pow = BigInt::from(dist.half()).pow(dist.n() as u32);
    let u_size = BigInt::from(dist.instance().universe_size());
    let top_den = BigInt::from(2) * &slice_pow;
    let bottom_den = &top_den * half_pow * u_size;

    let mut pmf: BTreeMap<String, BigRational> = BTreeMap::new();
    for w in &tops {
        *pmf.entry(w.to_string())
            .or_insert_with(|| BigRational::from_integer(0.into())) +=
            BigRational::new(1.into(), top_den.clone());
    }
    for (k, c) in bottom_counts {
        *pmf.entry(k)
            .or_insert_with(|| BigRational::from_integer(0.into())) +=
            BigRational::new(c.into(), bottom_den.clone());
    }
    Ok(pmf)
}

/// The definition's pmf over the support, keyed like [`sampler_exact_pmf`].
pub fn definition_pmf(
    dist: &LiftedDistribution,
    budget: u64,
) -> Result<BTreeMap<String, BigRational>, crate::construction::ConstructionError> {
    Ok(dist
        .support(budget)?
        .map(|(y, m)| (y.to_string(), m))
        .collect())
}

/// First key (in map order) where two pmfs differ, with both values (missing keys read 0).
pub fn first_pmf_difference(
    left: &BTreeMap<String, BigRational>,
    right: &BTreeMap<String, BigRational>,
) -> Option<(String, BigRational, BigRational)> {
    let zero = BigRational::from_integer(0.into());
    let mut keys: Vec<&String> = left.keys().chain(right.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter().find_map(|k| {
        let a = left.get(k).unwrap_or(&zero);
        let b = right.get(k).unwrap_or(&zero);
        (a != b).then(|| (k.clone(), a.clone(), b.clone()))
    })
}

/// `|{w ∈ Δ^1_n : w > z}|`.
pub fn count_above(dist: &LiftedDistribution, z: &LiftedPoint) -> u64 {
    dist.top_points().filter(|w| z.lt(w)).count() as u64
}

/// `(|{j ∈ one(w) : z ∈ w^{j←U}}|, |one(w)|)`.
pub fn count_hitting_indices(
    inst: &SetCoverInstance,
    w: &LiftedPoint,
    z: &LiftedPoint,
) -> Result<(u64, u64), SamplerError> {
    let one = one_positions(w)?;
    let hits = one
        .iter()
        .filter(|j| inst.universe().iter().any(|&u| substitute(w, j, u) == *z))
        .count() as u64;
    Ok((hits, one.len() as u64))
}

/// `⌈ℓ/2⌉^{n - wt(u)}`, the predicted count of Top points above a Bottom point of cell `u`.
pub fn predicted_above(dist: &LiftedDistribution, u: u64) -> u64 {
    (dist.half() as u64).pow(dist.n() as u32 - u.count_ones())
}

/// Renders a sampled trace on one line.
pub fn describe_trace(trace: &SamplerTrace, n: usize) -> String {
    match (&trace.j, trace.u) {
        (Some(j), Some(u)) => format!(
            "xi=0 w={} j={} u={} y={}",
            trace.w,
            j,
            format_bits(u, n),
            trace.output
        ),
        _ => format!("xi=1 w={} y={}", trace.w, trace.output),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::DEFAULT_BUDGET;
    use crate::rational::ratio;
    use num::{One, Zero};

    fn dist(n: usize, elems: &[&str], ell: usize) -> LiftedDistribution {
        LiftedDistribution::new(SetCoverInstance::from_bit_strings(n, elems).unwrap(), ell).unwrap()
    }

    fn pt(s: &str) -> LiftedPoint {
        s.parse().unwrap()
    }

    #[test]
    fn one_positions_examples() {
        let o = one_positions(&pt("110")).unwrap();
        assert_eq!(o.blocks(), &[vec![0, 1]]);
        let o = one_positions(&pt("110.011")).unwrap();
        assert_eq!(o.len(), 4);
        let all: Vec<String> = o.iter().map(|j| j.to_string()).collect();
        assert_eq!(all, ["(1,2)", "(1,3)", "(2,2)", "(2,3)"]);
        assert_eq!(one_positions(&pt("000")), Err(SamplerError::EmptyBlock(0)));
    }

    #[test]
    fn substitute_examples() {
        assert_eq!(substitute(&pt("110"), &IndexVector(vec![0]), 0), pt("010"));
        let z = pt("110.011");
        let j = IndexVector(vec![1, 2]);
        assert_eq!(substitute(&z, &j, 0b11), z);
        assert_eq!(substitute(&z, &j, 0), pt("100.010"));
    }

    #[test]
    fn substitute_universe_example() {
        let d = dist(2, &["01", "10"], 3);
        let w = pt("110.110");
        let out = substitute_universe(&d, &w, &IndexVector(vec![0, 0])).unwrap();
        assert_eq!(out, vec![pt("010.110"), pt("110.010")]);
        assert!(out
            .iter()
            .all(|y| matches!(d.classify(y), SupportClass::Bottom(_))));
        assert!(matches!(
            substitute_universe(&d, &w, &IndexVector(vec![2, 0])),
            Err(SamplerError::NotInOne { .. })
        ));
        assert!(matches!(
            substitute_universe(&d, &pt("100.110"), &IndexVector(vec![0, 0])),
            Err(SamplerError::NotTop(_))
        ));
    }

    #[test]
    fn draws_replay_and_stay_on_support() {
        let d = dist(2, &["01", "10"], 5);
        for i in 0..500 {
            let t = draw_indexed(&d, 42, i);
            assert_eq!(t, draw_indexed(&d, 42, i));
            match d.classify(&t.output) {
                SupportClass::Top => assert!(t.xi && t.output == t.w),
                SupportClass::Bottom(u) => {
                    assert!(!t.xi);
                    assert_eq!(Some(u), t.u);
                }
                SupportClass::Off => panic!("off-support draw {}", t.output),
            }
        }
    }

    #[test]
    fn exact_pmf_small() {
        let d = dist(1, &["0"], 3);
        let pmf = sampler_exact_pmf(&d, DEFAULT_BUDGET).unwrap();
        assert_eq!(pmf["100"], ratio(1, 6));
        assert_eq!(pmf.len(), 6);
        let d = dist(2, &["01", "10"], 3);
        let pmf = sampler_exact_pmf(&d, DEFAULT_BUDGET).unwrap();
        for (k, v) in &pmf {
            if let SupportClass::Bottom(_) = d.classify(&pt(k)) {
                assert_eq!(*v, ratio(1, 36));
            }
        }
        let total: BigRational = pmf.values().cloned().sum();
        assert!(total.is_one());
        assert_eq!(
            first_pmf_difference(&pmf, &definition_pmf(&d, DEFAULT_BUDGET).unwrap()),
            None
        );
    }

    #[test]
    fn difference_is_reported() {
        let d = dist(1, &["0"], 3);
        let a = sampler_exact_pmf(&d, DEFAULT_BUDGET).unwrap();
        let mut b = a.clone();
        *b.get_mut("010").unwrap() += ratio(1, 100);
        let (k, x, y) = first_pmf_difference(&a, &b).unwrap();
        assert_eq!(k, "010");
        assert!(x < y);
        b.remove("010");
        assert_eq!(first_pmf_difference(&a, &b).unwrap().2, BigRational::zero());
    }

    #[test]
    fn budget_refused() {
        let d = dist(2, &["01", "10"], 5);
        assert!(matches!(
            sampler_exact_pmf(&d, 10),
            Err(SamplerError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn counts_above_weight_one_element() {
        let d = dist(2, &["01"], 3);
        // u = 01: block 1 lower, block 2 upper.
        let z = pt("100.110");
        assert_eq!(d.classify(&z), SupportClass::Bottom(0b10));
        assert_eq!(count_above(&d, &z), 2);
        assert_eq!(predicted_above(&d, 0b10), 2);
        let w = pt("110.110");
        let (hits, total) = count_hitting_indices(d.instance(), &w, &z).unwrap();
        assert_eq!((hits, total), (2, 4));
    }

    #[test]
    fn empirical_frequencies_track_exact_pmf() {
        let d = dist(2, &["01", "10"], 3);
        let pmf = sampler_exact_pmf(&d, DEFAULT_BUDGET).unwrap();
        let draws = 100_000u64;
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for i in 0..draws {
            *counts
                .entry(draw_indexed(&d, 7, i).output.to_string())
                .or_insert(0) += 1;
        }
        assert!(counts.keys().all(|k| pmf.contains_key(k)));
        for (k, p) in &pmf {
            let p = crate::rational::to_f64(p);
            let got = *counts.get(k).unwrap_or(&0) as f64;
            let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
            assert!((got - draws as f64 * p).abs() <= 5.0 * sigma, "{k}");
        }
    }
}
