use std::cmp::Ordering;

use num::{BigRational, Zero};
use proptest::prelude::*;

use monolift::combinadic::{binomial, rank_fixed_weight, unrank_fixed_weight};
use monolift::construction::{LiftedDistribution, SupportClass, DEFAULT_BUDGET};
use monolift::dnf::{DecisionTree, Dnf, Term};
use monolift::learners::{
    full_support_sample, CappedGreedyLearner, EhTreeLearner, JuntaLearner, Learner,
};
use monolift::oracle::{ternary_gray, Oracle};
use monolift::point::{IndexVector, LiftedPoint, Var};
use monolift::rational::{cmp_pow2, fmt_ratio, parse_ratio, ratio};
use monolift::sampler::{draw_indexed, substitute};
use monolift::setcover::{greedy_cover, opt_exact, SetCoverInstance, SetSelection};

/// Instances with 1..=max_n sets and a nonempty universe.
fn instance(max_n: usize) -> impl Strategy<Value = SetCoverInstance> {
    (1..=max_n).prop_flat_map(|n| {
        let full = (1u64 << n) - 1;
        prop::collection::vec(0..full, 1..=6)
            .prop_map(move |v| SetCoverInstance::from_vectors(n, &v).unwrap())
    })
}

fn lifted(max_n: usize) -> impl Strategy<Value = LiftedDistribution> {
    (instance(max_n), prop::sample::select(vec![3usize, 5]))
        .prop_map(|(inst, ell)| LiftedDistribution::new(inst, ell).unwrap())
}

/// Random DNF over `n` blocks of length `ell`: per term, each variable is absent,
/// positive, or negated.
fn dnf(n: usize, ell: usize) -> impl Strategy<Value = Dnf> {
    let vars = n * ell;
    let term = prop::collection::vec(prop::sample::select(vec![0u8, 0, 0, 0, 1, 2]), vars);
    prop::collection::vec(term, 0..4).prop_map(move |terms| {
        terms
            .into_iter()
            .map(|digits| {
                let mut pos = Vec::new();
                let mut neg = Vec::new();
                for (k, d) in digits.into_iter().enumerate() {
                    let v = Var::new(k / ell, k % ell);
                    match d {
                        1 => pos.push(v),
                        2 => neg.push(v),
                        _ => {}
                    }
                }
                Term::new(&pos, &neg).unwrap()
            })
            .collect()
    })
}

fn lifted_with_dnf() -> impl Strategy<Value = (LiftedDistribution, Dnf)> {
    lifted(2).prop_flat_map(|d| {
        let f = dnf(d.n(), d.ell());
        (Just(d), f)
    })
}

/// Trees that test each variable at most once per path.
fn tree(n: usize, ell: usize) -> impl Strategy<Value = DecisionTree> {
    let leaf = any::<bool>().prop_map(DecisionTree::Leaf);
    leaf.prop_recursive(4, 16, 2, move |inner| {
        (0..n, 0..ell, inner.clone(), inner)
            .prop_map(|(b, t, z, o)| DecisionTree::node(Var::new(b, t), z, o))
    })
    .prop_filter("repeated variable on a path", |t| t.validate().is_ok())
}

fn one_leaves(t: &DecisionTree) -> usize {
    match t {
        DecisionTree::Leaf(v) => *v as usize,
        DecisionTree::Node { zero, one, .. } => one_leaves(zero) + one_leaves(one),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn is_cover_is_monotone(inst in instance(6), c in any::<u64>(), extra in 0usize..6) {
        let c = c & inst.full();
        let bigger = c | (1 << (extra % inst.n()));
        if inst.is_cover(SetSelection(c)) {
            prop_assert!(inst.is_cover(SetSelection(bigger)));
        }
    }

    #[test]
    fn opt_at_most_greedy_at_most_n(inst in instance(8)) {
        let sol = opt_exact(&inst);
        let g = greedy_cover(&inst);
        prop_assert!(inst.is_cover(sol.witness));
        prop_assert_eq!(sol.witness.len(), sol.size);
        prop_assert!(inst.is_cover(g));
        prop_assert!(sol.size <= g.len() && g.len() <= inst.n());
        let brute = (0..1u64 << inst.n())
            .filter(|&c| inst.is_cover(SetSelection(c)))
            .map(|c| c.count_ones() as usize)
            .min()
            .unwrap();
        prop_assert_eq!(sol.size, brute);
    }

    #[test]
    fn from_vectors_idempotent(inst in instance(8)) {
        let again = SetCoverInstance::from_vectors(inst.n(), inst.universe()).unwrap();
        prop_assert_eq!(&again, &inst);
        let via_json = SetCoverInstance::from_json(&inst.to_json()).unwrap();
        prop_assert_eq!(via_json, inst);
    }

    #[test]
    fn fixed_weight_rank_round_trip(len in 1u32..20, w in 0u32..20, r in any::<u64>()) {
        let w = w % (len + 1);
        let r = r % binomial(len as u64, w as u64);
        let m = unrank_fixed_weight(len, w, r);
        prop_assert_eq!(m.count_ones(), w);
        prop_assert!(m < 1 << len);
        prop_assert_eq!(rank_fixed_weight(m), r);
    }

    #[test]
    fn ratio_text_round_trip(p in -1000i64..1000, q in 1i64..1000) {
        let r = ratio(p, q);
        let text = fmt_ratio(&r);
        prop_assert_eq!(parse_ratio(&text).unwrap(), r.clone());
        let (a, b) = text.split_once('/').unwrap();
        let (a, b): (i64, i64) = (a.parse().unwrap(), b.parse().unwrap());
        prop_assert_eq!(num::integer::gcd(a, b), 1);
    }

    #[test]
    fn cmp_pow2_matches_floats_away_from_ties(p in 1u64..500, q in 1u64..500, e in -40i64..40, d in 1i64..8) {
        let v = ratio(p, q);
        let x = (p as f64 / q as f64).log2();
        let y = e as f64 / d as f64;
        prop_assume!((x - y).abs() > 1e-9);
        let expect = if x < y { Ordering::Less } else { Ordering::Greater };
        prop_assert_eq!(cmp_pow2(&v, &ratio(e, d)), expect);
    }

    #[test]
    fn ternary_gray_steps_change_one_digit(digits in 1usize..8, i in 0u64..2000) {
        let total = 3u64.pow(digits as u32);
        let i = i % (total - 1);
        let a = ternary_gray(i, digits);
        let b = ternary_gray(i + 1, digits);
        let diffs: Vec<_> = a.iter().zip(&b).filter(|(x, y)| x != y).collect();
        prop_assert_eq!(diffs.len(), 1);
        prop_assert_eq!((*diffs[0].0 as i8 - *diffs[0].1 as i8).abs(), 1);
    }

    #[test]
    fn point_text_round_trip(ell in prop::sample::select(vec![3usize, 5, 7]), blocks in prop::collection::vec(any::<u64>(), 1..4)) {
        let blocks: Vec<u64> = blocks.into_iter().map(|b| b & ((1 << ell) - 1)).collect();
        let y = LiftedPoint::new(ell, blocks).unwrap();
        prop_assert_eq!(y.to_string().parse::<LiftedPoint>().unwrap(), y);
    }

    #[test]
    fn dnf_text_round_trip(f in dnf(3, 5)) {
        let text = f.to_string();
        prop_assert_eq!(text.parse::<Dnf>().unwrap(), f);
    }

    #[test]
    fn support_is_partitioned(d in lifted(3)) {
        let slice = d.slice_size() as u128;
        let cells = d.instance().universe_size() as u128;
        let mut bottom = 0u128;
        let mut total = BigRational::zero();
        for (y, mass) in d.support(DEFAULT_BUDGET).unwrap() {
            prop_assert_eq!(&mass, &d.pmf(&y));
            total += mass;
            match d.classify(&y) {
                SupportClass::Top => prop_assert!(d.gamma(&y).unwrap()),
                SupportClass::Bottom(u) => {
                    bottom += 1;
                    prop_assert!(d.instance().contains(u));
                    prop_assert!(!d.gamma(&y).unwrap());
                }
                SupportClass::Off => prop_assert!(false, "support point classified off"),
            }
        }
        prop_assert_eq!(bottom, cells * slice.pow(d.n() as u32));
        prop_assert_eq!(total, ratio(1, 1));
    }

    #[test]
    fn junta_form_of_every_cover_matches_target(d in lifted(3)) {
        for c in 0..1u64 << d.n() {
            let sel = SetSelection(c);
            match d.monotone_junta_form(sel) {
                Ok(f) => {
                    prop_assert!(d.instance().is_cover(sel));
                    for (y, _) in d.support(DEFAULT_BUDGET).unwrap() {
                        prop_assert_eq!(f.accepts(&y), d.gamma(&y).unwrap());
                    }
                }
                Err(_) => prop_assert!(!d.instance().is_cover(sel)),
            }
        }
    }

    #[test]
    fn draws_land_on_support(d in lifted(3), seed in any::<u64>(), idx in 0u64..1000) {
        let t = draw_indexed(&d, seed, idx);
        prop_assert!(!d.pmf(&t.output).is_zero());
        prop_assert_eq!(d.gamma(&t.output).unwrap(), t.xi);
        prop_assert_eq!(draw_indexed(&d, seed, idx).output, t.output);
    }

    #[test]
    fn surgery_below_current_bits_never_raises_weight(
        ell in prop::sample::select(vec![3usize, 5, 7]),
        blocks in prop::collection::vec(any::<u64>(), 1..4),
        js in prop::collection::vec(0u32..7, 4),
        a in any::<u64>(),
    ) {
        let blocks: Vec<u64> = blocks.into_iter().map(|b| b & ((1 << ell) - 1)).collect();
        let z = LiftedPoint::new(ell, blocks).unwrap();
        let j = IndexVector(js[..z.n()].iter().map(|&x| x % ell as u32).collect());
        // Keep a_i only where z already has a 1 at position j_i.
        let a = (0..z.n()).fold(0u64, |m, i| {
            if a >> i & 1 == 1 && z.block(i) >> j.get(i) & 1 == 1 { m | 1 << i } else { m }
        });
        let y = substitute(&z, &j, a);
        for (wy, wz) in y.weights().iter().zip(z.weights()) {
            prop_assert!(*wy <= wz);
        }
    }

    #[test]
    fn dist_is_mean_of_conditional_errors((d, f) in lifted_with_dnf()) {
        let o = Oracle::new(d, DEFAULT_BUDGET).unwrap();
        let r = o.dist_exact(&f).unwrap();
        let half = ratio(1, 2);
        prop_assert_eq!(&r.dist, &(&half * &r.err_given_1 + &half * &r.err_given_0));
    }

    #[test]
    fn mwidth_bounds((d, f) in lifted_with_dnf()) {
        for (z, _) in d.support(DEFAULT_BUDGET).unwrap() {
            let w = f.mwidth(&z);
            let sat: Vec<&Term> = f.terms().iter().filter(|t| t.accepts(&z)).collect();
            for t in &sat {
                prop_assert!(w <= t.monotone_size());
            }
            let zero = sat.is_empty() || sat.iter().any(|t| t.monotone_size() == 0);
            prop_assert_eq!(w == 0, zero);
        }
    }

    #[test]
    fn truncation_only_drops_ones((d, f) in lifted_with_dnf(), bound in 0usize..8) {
        let g = f.truncate_monotone(bound, d.ell());
        prop_assert!(g.size() <= f.size());
        for (y, _) in d.support(DEFAULT_BUDGET).unwrap() {
            if g.accepts(&y) {
                prop_assert!(f.accepts(&y));
            }
        }
    }

    #[test]
    fn tree_to_dnf_counts_one_leaves(t in tree(2, 3)) {
        let f = t.to_dnf();
        prop_assert_eq!(f.size(), one_leaves(&t));
        prop_assert!(f.size() <= t.size());
        let d = LiftedDistribution::new(SetCoverInstance::from_bit_strings(2, &["01"]).unwrap(), 3).unwrap();
        for (y, _) in d.support(DEFAULT_BUDGET).unwrap() {
            prop_assert_eq!(f.accepts(&y), t.eval(&y));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn learners_are_consistent_and_deterministic(d in lifted(2)) {
        let sample = full_support_sample(&d);
        let opt = opt_exact(d.instance()).size;
        let learners: Vec<Box<dyn Learner>> = vec![
            Box::new(JuntaLearner { m: opt * d.ell() }),
            Box::new(EhTreeLearner { s: 2 }),
        ];
        for l in &learners {
            let a = l.learn_sample(&sample, 200_000);
            let b = l.learn_sample(&sample, 200_000);
            prop_assert_eq!(&a, &b);
            if let Ok(out) = a {
                if let Some(f) = &out.hypothesis {
                    prop_assert!(!out.aborted);
                    prop_assert!(monolift::learners::consistent(f, &sample), "{} inconsistent", l.name());
                }
            }
        }
    }

    /// The term cap can leave positives uncovered, but no term ever accepts a negative, and
    /// stopping below the cap means every positive is covered.
    #[test]
    fn greedy_never_accepts_negatives(d in lifted(2), cap in 1usize..4) {
        let sample = full_support_sample(&d);
        let g = CappedGreedyLearner { cap };
        let out = g.learn_sample(&sample, u64::MAX).unwrap();
        prop_assert_eq!(&out, &g.learn_sample(&sample, u64::MAX).unwrap());
        let f = out.hypothesis.unwrap();
        prop_assert!(f.size() <= cap && f.is_monotone());
        prop_assert!(sample.iter().filter(|e| !e.label).all(|e| !f.accepts(&e.point)));
        if f.size() < cap {
            prop_assert!(monolift::learners::consistent(&f, &sample));
        }
    }
}
