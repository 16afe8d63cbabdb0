//! The desk suite of small instances, a seeded hypothesis corpus, and check runners that
//! report one outcome per property.

use std::fmt;

use num::{BigRational, One};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::combinadic::{ones, FixedWeight};
use crate::construction::{check_factopt, LiftedDistribution, SupportClass, DEFAULT_BUDGET};
use crate::dnf::{Dnf, Term};
use crate::oracle::{
    check_term_tail, term_tail_enumerated, LemmaVariant, LemmaVerdict, Oracle, OracleError,
    Strategy,
};
use crate::point::{IndexVector, LiftedPoint, Var};
use crate::sampler::{
    count_above, count_hitting_indices, definition_pmf, first_pmf_difference, one_positions,
    predicted_above, sampler_exact_pmf, substitute, substitute_universe,
};
use crate::setcover::{SetCoverInstance, SetSelection};

/// Block lengths every suite instance is lifted with.
pub const SUITE_ELLS: [usize; 2] = [3, 5];

/// Candidate cap for the exhaustive error-lemma sweeps run by [`verify_lemmas`].
pub const LEMMA_SWEEP_CAP: u128 = 100_000;

#[derive(Debug, Clone)]
pub struct SuiteInstance {
    pub name: &'static str,
    pub instance: SetCoverInstance,
}

/// The six named desk instances.
pub fn desk_instances() -> Vec<SuiteInstance> {
    let table: [(&str, usize, &[&str]); 6] = [
        ("single", 1, &["0"]),
        ("cross", 2, &["01", "10"]),
        ("lone", 2, &["01"]),
        ("pair", 3, &["110", "101"]),
        ("triangle", 3, &["011", "101", "110"]),
        ("square", 2, &["00", "01", "10"]),
    ];
    table
        .iter()
        .map(|&(name, n, elems)| SuiteInstance {
            name,
            instance: SetCoverInstance::from_bit_strings(n, elems).expect("valid suite instance"),
        })
        .collect()
}

/// Every desk instance at every suite block length.
pub fn desk_suite() -> Vec<(String, LiftedDistribution)> {
    desk_instances()
        .into_iter()
        .flat_map(|s| {
            SUITE_ELLS.iter().map(move |&ell| {
                (
                    format!("{}-l{}", s.name, ell),
                    LiftedDistribution::new(s.instance.clone(), ell).expect("odd ell"),
                )
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub check: String,
    pub status: Status,
    pub detail: String,
}

impl CheckOutcome {
    fn new(check: &str, status: Status, detail: impl Into<String>) -> Self {
        CheckOutcome {
            check: check.to_string(),
            status,
            detail: detail.into(),
        }
    }

    fn verdict(check: &str, ok: bool, detail: impl Into<String>) -> Self {
        Self::new(check, if ok { Status::Pass } else { Status::Fail }, detail)
    }

    pub fn to_json(&self) -> Value {
        json!({"check": self.check, "status": self.status.to_string(), "detail": self.detail})
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.status, self.check, self.detail)
    }
}

fn all_vars(n: usize, ell: usize) -> Vec<Var> {
    (0..n)
        .flat_map(|i| (0..ell).map(move |t| Var::new(i, t)))
        .collect()
}

/// Minimal majority terms of one block.
fn block_majority(block: usize, ell: usize) -> Dnf {
    FixedWeight::new(ell as u32, ell.div_ceil(2) as u32)
        .map(|m| {
            Term::positive(
                &ones(m)
                    .map(|t| Var::new(block, t as usize))
                    .collect::<Vec<_>>(),
            )
        })
        .collect()
}

fn random_term(rng: &mut ChaCha8Rng, vars: &[Var], p_pos: f64, p_neg: f64) -> Term {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for &v in vars {
        let r: f64 = rng.gen();
        if r < p_pos {
            pos.push(v);
        } else if r < p_pos + p_neg {
            neg.push(v);
        }
    }
    Term::new(&pos, &neg).expect("disjoint literal sets")
}

/// Seeded hypothesis family: constants, junta forms of every cover with their truncations
/// and random sub-families, per-block majorities, single literals, and random small DNFs,
/// padded with random DNFs up to `min_count`.
pub fn hypothesis_corpus(dist: &LiftedDistribution, seed: u64, min_count: usize) -> Vec<Dnf> {
    let (n, ell) = (dist.n(), dist.ell());
    let vars = all_vars(n, ell);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Dnf::empty(), Dnf::constant_one()];

    for mask in 1..1u64 << n {
        let Ok(junta) = dist.monotone_junta_form(SetSelection(mask)) else {
            continue;
        };
        for bound in 0..=junta.max_monotone_size() {
            out.push(junta.truncate_monotone(bound, ell));
        }
        let mut junk = junta.clone();
        junk.push(Term::positive(&vars));
        out.push(junk);
        for keep in [0.9, 0.5, 0.2, 0.05] {
            let sub: Dnf = junta
                .terms()
                .iter()
                .filter(|_| rng.gen_bool(keep))
                .cloned()
                .collect();
            out.push(sub);
        }
        out.push(junta);
    }
    for i in 0..n {
        out.push(block_majority(i, ell));
    }
    for &v in &vars {
        out.push(Dnf::new(vec![Term::positive(&[v])]));
        out.push(Dnf::new(
            vec![Term::new(&[], &[v]).expect("single literal")],
        ));
    }
    while out.len() < min_count {
        let terms = rng.gen_range(1..=4);
        let (p_pos, p_neg) = if rng.gen_bool(0.5) {
            (0.2, 0.0)
        } else {
            (0.15, 0.05)
        };
        out.push(
            (0..terms)
                .map(|_| random_term(&mut rng, &vars, p_pos, p_neg))
                .collect(),
        );
    }
    out
}

/// Facts about the construction and the sampler, checked exhaustively.
pub fn verify_facts(oracle: &Oracle, seed: u64) -> Vec<CheckOutcome> {
    let dist = oracle.distribution();
    let inst = dist.instance();
    let mut out = Vec::new();

    let half = BigRational::new(1.into(), 2.into());
    let top: BigRational = oracle.top().iter().map(|y| dist.pmf(y)).sum();
    let bottom: BigRational = oracle.bottom().iter().map(|y| dist.pmf(y)).sum();
    out.push(CheckOutcome::verdict(
        "halff",
        top == half && bottom == half,
        format!("top {top}, bottom {bottom}"),
    ));

    let subsets = 1u64 << inst.n();
    let bad = (0..subsets)
        .map(SetSelection)
        .find(|&c| check_factopt(inst, c) != inst.is_cover(c));
    out.push(CheckOutcome::verdict(
        "factopt",
        bad.is_none(),
        match bad {
            None => format!("{subsets} subsets agree"),
            Some(c) => format!("disagreement at {c}"),
        },
    ));

    let mut oell_fail = None;
    let mut covers = 0;
    for mask in 0..subsets {
        if let Ok(f) = dist.monotone_junta_form(SetSelection(mask)) {
            covers += 1;
            let all = oracle.top().iter().chain(oracle.bottom());
            if let Some(y) = all
                .into_iter()
                .find(|y| f.accepts(y) != dist.gamma(y).unwrap())
            {
                oell_fail.get_or_insert(format!("cover {} fails at {y}", SetSelection(mask)));
            }
        }
    }
    out.push(CheckOutcome::verdict(
        "oell",
        oell_fail.is_none(),
        oell_fail.unwrap_or(format!("{covers} covers agree on the support")),
    ));

    out.push(
        match (
            sampler_exact_pmf(dist, 10_000_000),
            definition_pmf(dist, DEFAULT_BUDGET),
        ) {
            (Ok(s), Ok(d)) => {
                let total: BigRational = s.values().cloned().sum();
                match first_pmf_difference(&s, &d) {
                    None => CheckOutcome::verdict(
                        "sample",
                        total.is_one(),
                        format!("{} points agree, total {total}", d.len()),
                    ),
                    Some((k, a, b)) => CheckOutcome::verdict(
                        "sample",
                        false,
                        format!("{k}: sampler {a}, definition {b}"),
                    ),
                }
            }
            (Err(e), _) => CheckOutcome::new("sample", Status::Skipped, e.to_string()),
            (_, Err(e)) => CheckOutcome::new("sample", Status::Skipped, e.to_string()),
        },
    );

    out.push(check_factz(oracle, seed, 200));
    out.push(check_counting_identities(oracle));
    out
}

/// Random `(w, j, a, T)` tuples with `T(w) = 1`: `w^{j←U}` lies in the Bottom support with
/// `|U|` distinct points, and `T(w^{j←a}) = T^j(a)`.
pub fn check_factz(oracle: &Oracle, seed: u64, tuples: usize) -> CheckOutcome {
    let dist = oracle.distribution();
    let n = dist.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..tuples {
        let w = &oracle.top()[rng.gen_range(0..oracle.top().len())];
        let one = one_positions(w).expect("Top blocks are nonempty");
        let j = IndexVector(
            one.blocks()
                .iter()
                .map(|b| b[rng.gen_range(0..b.len())])
                .collect(),
        );
        let a = rng.gen_range(0..1u64 << n);
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for v in all_vars(n, dist.ell()) {
            if rng.gen_bool(0.3) {
                if w.bit(v) {
                    pos.push(v);
                } else {
                    neg.push(v);
                }
            }
        }
        let term = Term::new(&pos, &neg).expect("literals read off one point");
        let image = match substitute_universe(dist, w, &j) {
            Ok(img) => img,
            Err(e) => return CheckOutcome::verdict("factz", false, format!("tuple {k}: {e}")),
        };
        let mut distinct = image.clone();
        distinct.sort();
        distinct.dedup();
        let bottom = image
            .iter()
            .all(|y| matches!(dist.classify(y), SupportClass::Bottom(_)));
        let identity =
            term.accepts(&substitute(w, &j, a)) == term.project(&j).eval_projected(&j, a);
        if !(bottom && distinct.len() == dist.instance().universe_size() && identity) {
            return CheckOutcome::verdict(
                "factz",
                false,
                format!("tuple {k}: w={w} j={j} a={a:b} T={term}"),
            );
        }
    }
    CheckOutcome::verdict("factz", true, format!("{tuples} tuples"))
}

/// For every Bottom point `z` of cell `u`: exactly `⌈ℓ/2⌉^{n-wt(u)}` Top points lie above
/// it, and for each of them the fraction of `j ∈ one(w)` with `z ∈ w^{j←U}` is the
/// reciprocal of that count.
pub fn check_counting_identities(oracle: &Oracle) -> CheckOutcome {
    let dist = oracle.distribution();
    let inst = dist.instance();
    let mut pairs = 0u64;
    for z in oracle.bottom() {
        let SupportClass::Bottom(u) = dist.classify(z) else {
            return CheckOutcome::verdict("above-counts", false, format!("{z} is not Bottom"));
        };
        let expect = predicted_above(dist, u);
        let above = count_above(dist, z);
        if above != expect {
            return CheckOutcome::verdict(
                "above-counts",
                false,
                format!("{z}: {above} points above, expected {expect}"),
            );
        }
        for w in oracle.top().iter().filter(|w| z.lt(w)) {
            pairs += 1;
            let (hits, total) = count_hitting_indices(inst, w, z).expect("Top point");
            if hits * expect != total {
                return CheckOutcome::verdict(
                    "above-counts",
                    false,
                    format!("z={z} w={w}: {hits}/{total}, expected 1/{expect}"),
                );
            }
        }
    }
    CheckOutcome::verdict(
        "above-counts",
        true,
        format!("{} Bottom points, {pairs} pairs", oracle.bottom().len()),
    )
}

/// Tallies a corpus run: applicable cases, failures, first failure.
struct Tally {
    name: &'static str,
    applicable: usize,
    total: usize,
    failure: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            applicable: 0,
            total: 0,
            failure: None,
        }
    }

    fn record<R>(&mut self, f: &Dnf, r: Result<R, OracleError>, pass: impl Fn(&R) -> bool) {
        self.total += 1;
        if let Ok(r) = r {
            self.applicable += 1;
            if !pass(&r) && self.failure.is_none() {
                self.failure = Some(format!("fails on F = {f}"));
            }
        }
    }

    fn finish(self) -> CheckOutcome {
        match self.failure {
            Some(msg) => CheckOutcome::verdict(self.name, false, msg),
            None => CheckOutcome::verdict(
                self.name,
                true,
                format!(
                    "{} of {} hypotheses applicable",
                    self.applicable, self.total
                ),
            ),
        }
    }
}

/// Every count vector with entries in `0..=max` of the given length.
fn count_vectors(len: usize, max: u32) -> Vec<Vec<u32>> {
    crate::combinadic::odometer(&vec![max as usize + 1; len])
        .map(|v| v.into_iter().map(|x| x as u32).collect())
        .collect()
}

/// The tail bound for every block count vector (up to `n` blocks), with a cross-check
/// against enumeration; at `ℓ = 3` the refusal path is what is checked.
pub fn check_lstep(ell: usize, n: usize) -> CheckOutcome {
    if ell < 5 {
        let refused = check_term_tail(ell, &[1]) == Err(OracleError::LemmaRequiresEll5);
        return CheckOutcome::verdict("lstep", refused, "ell = 3 is refused");
    }
    let half = ell.div_ceil(2) as u32;
    let mut checked = 0;
    for len in 1..=n {
        for b in count_vectors(len, half) {
            if b.iter().sum::<u32>() == 0 {
                continue;
            }
            checked += 1;
            let r = match check_term_tail(ell, &b) {
                Ok(r) => r,
                Err(e) => return CheckOutcome::verdict("lstep", false, format!("{b:?}: {e}")),
            };
            let cross =
                len > 2 || term_tail_enumerated(ell, &b).ok() == Some(r.probability.clone());
            if !r.pass || !cross {
                return CheckOutcome::verdict(
                    "lstep",
                    false,
                    format!("{b:?}: probability {}", r.probability),
                );
            }
        }
    }
    CheckOutcome::verdict("lstep", true, format!("{checked} count vectors"))
}

/// Claims over a hypothesis corpus. Hypotheses outside a claim's hypotheses are counted as
/// not applicable.
pub fn verify_claims(oracle: &Oracle, corpus: &[Dnf]) -> Vec<CheckOutcome> {
    let mut out = vec![check_lstep(oracle.ell(), oracle.n())];

    if oracle.ell() < 5 {
        out.push(CheckOutcome::new(
            "truncate",
            Status::Skipped,
            "needs ell >= 5",
        ));
    } else {
        let mut t = Tally::new("truncate");
        for f in corpus {
            t.record(f, oracle.check_truncate(f), |r| r.holds);
        }
        out.push(t.finish());
    }

    if oracle.opt() < 2 {
        out.push(CheckOutcome::new(
            "coor",
            Status::Skipped,
            format!("opt = {} is the degenerate regime", oracle.opt()),
        ));
    } else {
        let mut t = Tally::new("coor");
        for f in corpus {
            let zs: Vec<&LiftedPoint> = oracle.omega(f).take(2).collect();
            for z in zs {
                t.record(f, oracle.check_claim_coor(f, z), |r| r.pass);
            }
        }
        out.push(t.finish());
    }

    let mut coor_a = Tally::new("coorA");
    let mut pop = Tally::new("pop");
    let mut jkl = Tally::new("jkl");
    for f in corpus {
        coor_a.record(f, oracle.check_claim_coor_a(f), |r| r.pass);
        pop.record(f, oracle.check_claim_pop(f), |r| r.pass);
        jkl.record(f, oracle.check_claim_jkl(f), |r| r.pass);
    }
    out.extend([coor_a.finish(), pop.finish(), jkl.finish()]);
    out
}

/// Exhaustive single-term sweeps for both error-lemma variants.
pub fn verify_lemmas(oracle: &Oracle, max_candidates: u128) -> Vec<CheckOutcome> {
    [("errorA", LemmaVariant::V16), ("error", LemmaVariant::V20)]
        .into_iter()
        .map(|(name, v)| {
            match oracle.falsify_error_lemma(v, &Strategy::ExhaustiveSingleTerm, max_candidates) {
                Ok(r) => {
                    let detail = format!(
                        "{}: min dist {} vs bound {} over {} candidates ({})",
                        r.verdict,
                        crate::rational::fmt_ratio(&r.best_dist),
                        r.bound_text(),
                        r.candidates,
                        r.note
                    );
                    CheckOutcome::verdict(name, r.verdict != LemmaVerdict::Refuted, detail)
                }
                Err(e) => CheckOutcome::new(name, Status::Skipped, e.to_string()),
            }
        })
        .collect()
}
