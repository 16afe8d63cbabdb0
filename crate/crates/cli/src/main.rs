//! `monolift`: command-line front end for the lifted set-cover construction.
//!
//! Exit codes: 0 on success, 1 when a check fails, 2 on usage or input errors.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num::BigRational;
use rayon::prelude::*;
use serde_json::{json, Value};

use monolift::construction::{LiftedDistribution, SupportClass, DEFAULT_BUDGET};
use monolift::dnf::Dnf;
use monolift::learners::{
    default_sample_size, CappedGreedyLearner, EhTreeLearner, JuntaLearner, Learner, LearnerBudget,
    SampleOracle,
};
use monolift::oracle::{dist_exact, LemmaVariant, LemmaVerdict, Oracle, Strategy};
use monolift::point::LiftedPoint;
use monolift::rational::{fmt_ratio, parse_ratio};
use monolift::reduction::{algorithm_b, algorithm_b_proper, DistanceMode, Eta, ReductionParams};
use monolift::sampler::{
    definition_pmf, describe_trace, draw_indexed, first_pmf_difference, sampler_exact_pmf,
};
use monolift::setcover::{
    greedy_cover, opt_exact, planted_instance_with_extras, random_instance, SetCoverInstance,
};
use monolift::suite::{
    desk_instances, hypothesis_corpus, verify_claims, verify_facts, verify_lemmas, CheckOutcome,
    Status, LEMMA_SWEEP_CAP, SUITE_ELLS,
};

#[derive(Parser)]
#[command(
    name = "monolift",
    version,
    about = "Lifted set-cover instances, exact checks and learner runs"
)]
struct Cli {
    /// Seed for every randomized path.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(clap::Args, Clone)]
struct Lift {
    /// Instance file, `{"n": 3, "universe": ["110", "101"]}`.
    #[arg(long)]
    instance: PathBuf,
    /// Odd block length.
    #[arg(long, default_value_t = 5)]
    ell: usize,
    /// Largest support the exact routines may enumerate.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(clap::Args, Clone)]
struct LearnerArgs {
    /// Junta size for `junta`; defaults to opt·ℓ.
    #[arg(long)]
    m: Option<usize>,
    /// Tree rank bound for `ehdt`.
    #[arg(long, default_value_t = 4)]
    s: usize,
    /// Term cap for `greedy`.
    #[arg(long, default_value_t = 1)]
    cap: usize,
    /// Draws handed to the learner; defaults to 8·S·ln S for support size S.
    #[arg(long, value_parser = parse_count)]
    examples: Option<u64>,
    /// Step budget (accepts forms like `1e7`).
    #[arg(long, value_parser = parse_count, default_value = "1e9")]
    steps: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Junta,
    Ehdt,
    Greedy,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Random,
    Planted,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteKind {
    Facts,
    Claims,
    Lemmas,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyKind {
    Exhaustive1,
    ExhaustiveK,
    LocalSearch,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Sampled,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded set-cover instance.
    Gen {
        #[arg(long, value_enum, default_value = "planted")]
        family: Family,
        /// Number of sets.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Universe size (random family) or extra elements (planted family).
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Planted optimum.
        #[arg(long, default_value_t = 2)]
        opt: usize,
        /// Probability that a coordinate is zero (random family).
        #[arg(long, default_value_t = 0.5)]
        density: f64,
    },
    /// Exact and greedy set cover.
    SolveCover {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Summarize the lifted distribution.
    Build {
        #[command(flatten)]
        lift: Lift,
    },
    /// Exact mass and target value at one point.
    Pmf {
        #[command(flatten)]
        lift: Lift,
        #[arg(long)]
        point: String,
    },
    /// Draw points from the two-phase sampler, one per line.
    Sample {
        #[command(flatten)]
        lift: Lift,
        #[arg(long, default_value_t = 10)]
        count: u64,
        /// Print the sampler's internal choices alongside each point.
        #[arg(long)]
        trace: bool,
    },
    /// Compare the sampler's exact output law with the defining pmf.
    PmfCheck {
        #[command(flatten)]
        lift: Lift,
        /// Test double: add 1/1000 to the sampler's mass at this point before comparing.
        #[arg(long)]
        corrupt_point: Option<String>,
    },
    /// Exact distance between a DNF and the target.
    Dist {
        #[command(flatten)]
        lift: Lift,
        /// DNF text, e.g. `+1.1 +1.2 | -2.3`.
        #[arg(long, conflicts_with = "dnf_file")]
        dnf: Option<String>,
        #[arg(long)]
        dnf_file: Option<PathBuf>,
    },
    /// Run a check suite; without `--instance` every desk instance is checked.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteKind,
        #[arg(long)]
        instance: Option<PathBuf>,
        /// Block length; without it the desk lengths are all used.
        #[arg(long)]
        ell: Option<usize>,
        /// Minimum hypothesis corpus size.
        #[arg(long, default_value_t = 200)]
        corpus: usize,
        #[arg(long, default_value_t = LEMMA_SWEEP_CAP)]
        max_candidates: u128,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Search for a counterexample to the error lemma.
    Falsify {
        #[command(flatten)]
        lift: Lift,
        #[arg(long, default_value = "v16")]
        variant: LemmaVariant,
        #[arg(long, value_enum, default_value = "exhaustive1")]
        strategy: StrategyKind,
        /// Term count for `exhaustive-k`.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Variable window for `exhaustive-k`.
        #[arg(long, default_value_t = 4)]
        window: usize,
        /// Iterations for `local-search`.
        #[arg(long, default_value_t = 10_000)]
        iters: u64,
        #[arg(long, default_value_t = 100_000_000)]
        max_candidates: u128,
    },
    /// Run a learner on samples from the lifted distribution.
    Learn {
        #[command(flatten)]
        lift: Lift,
        #[arg(long, value_enum)]
        algo: Algo,
        #[command(flatten)]
        learner: LearnerArgs,
    },
    /// Run the set-cover distinguisher with a learner.
    Reduce {
        #[command(flatten)]
        lift: Lift,
        #[arg(long, value_enum, default_value = "junta")]
        learner: Algo,
        #[command(flatten)]
        args: LearnerArgs,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        /// Draws used by the sampled distance.
        #[arg(long, value_parser = parse_count, default_value = "10000")]
        samples: u64,
        /// Reject hypotheses with more terms than this.
        #[arg(long)]
        size_cap: Option<u64>,
        /// Yes threshold as `p/q`; defaults to 1/(16N).
        #[arg(long)]
        threshold: Option<String>,
    },
    /// Sweep instance families and learners, emitting CSV.
    Bench {
        #[arg(long, value_enum, default_value = "planted")]
        family: Family,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        opt: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "3")]
        ell: Vec<usize>,
        #[arg(
            long,
            value_enum,
            value_delimiter = ',',
            default_value = "junta,greedy"
        )]
        learners: Vec<Algo>,
        /// Instances per (n, opt) pair.
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[command(flatten)]
        args: LearnerArgs,
    },
}

/// Integer counts, also written as `1e7` or `2.5e6`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("not a count: {s}"))?;
    if f.is_finite() && f >= 0.0 && f.fract() == 0.0 && f <= u64::MAX as f64 {
        Ok(f as u64)
    } else {
        Err(format!("not a nonnegative integer: {s}"))
    }
}

/// Failure of a check, reported with exit code 1.
#[derive(Debug)]
struct CheckFailed(String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let mut out = io::stdout().lock();
    match run(&cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            if e.downcast_ref::<CheckFailed>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn load_instance(path: &PathBuf) -> Result<SetCoverInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SetCoverInstance::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_lift(lift: &Lift) -> Result<LiftedDistribution> {
    Ok(LiftedDistribution::new(
        load_instance(&lift.instance)?,
        lift.ell,
    )?)
}

fn emit(
    out: &mut impl Write,
    format: Format,
    value: &Value,
    text: impl FnOnce() -> String,
) -> Result<()> {
    match format {
        Format::Text => writeln!(out, "{}", text())?,
        _ => writeln!(out, "{}", serde_json::to_string_pretty(value)?)?,
    }
    Ok(())
}

fn text_of(value: &Value) -> String {
    match value {
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| match v {
                Value::String(s) => format!("{k}: {s}"),
                other => format!("{k}: {other}"),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        other => other.to_string(),
    }
}

fn make_learner(algo: Algo, args: &LearnerArgs, opt: usize, ell: usize) -> Box<dyn Learner + Sync> {
    match algo {
        Algo::Junta => Box::new(JuntaLearner {
            m: args.m.unwrap_or(opt * ell),
        }),
        Algo::Ehdt => Box::new(EhTreeLearner { s: args.s }),
        Algo::Greedy => Box::new(CappedGreedyLearner { cap: args.cap }),
    }
}

fn run(cli: &Cli, out: &mut impl Write) -> Result<()> {
    let seed = cli.seed;
    let fmt = |default: Format| cli.format.unwrap_or(default);
    match &cli.command {
        Command::Gen {
            family,
            n,
            m,
            opt,
            density,
        } => {
            let inst = match family {
                Family::Random => random_instance(*n, *m, *density, seed)?,
                Family::Planted => planted_instance_with_extras(*n, *opt, *m, seed)?.instance,
            };
            match fmt(Format::Json) {
                Format::Text => writeln!(out, "{inst}")?,
                _ => writeln!(out, "{}", inst.to_json())?,
            }
        }
        Command::SolveCover { instance } => {
            let inst = load_instance(instance)?;
            let sol = opt_exact(&inst);
            let greedy = greedy_cover(&inst);
            let v = json!({
                "opt": sol.size,
                "witness": sol.witness.indices(),
                "greedy_size": greedy.len(),
                "greedy": greedy.indices(),
            });
            emit(out, fmt(Format::Json), &v, || text_of(&v))?;
        }
        Command::Build { lift } => {
            let d = load_lift(lift)?;
            let opt = opt_exact(d.instance());
            let v = json!({
                "n": d.n(),
                "ell": d.ell(),
                "universe_size": d.instance().universe_size(),
                "opt": opt.size,
                "slice_size": d.slice_size(),
                "top_count": d.top_count().map(|c| c.to_string()),
                "bottom_count": d.bottom_count().map(|c| c.to_string()),
                "support_size": d.support_size().map(|c| c.to_string()),
                "top_point_mass": fmt_ratio(&d.top_mass()),
                "bottom_point_mass": fmt_ratio(&d.bottom_mass()),
                "within_budget": d.check_budget(lift.budget).is_ok(),
            });
            emit(out, fmt(Format::Json), &v, || text_of(&v))?;
        }
        Command::Pmf { lift, point } => {
            let d = load_lift(lift)?;
            let y: LiftedPoint = point.parse()?;
            if y.n() != d.n() || y.ell() != d.ell() {
                bail!(
                    "point {y} does not have {} blocks of length {}",
                    d.n(),
                    d.ell()
                );
            }
            let class = match d.classify(&y) {
                SupportClass::Top => "top".to_string(),
                SupportClass::Bottom(u) => {
                    format!("bottom {}", monolift::setcover::format_bits(u, d.n()))
                }
                SupportClass::Off => "off".to_string(),
            };
            let v = json!({
                "point": y.to_string(),
                "mass": fmt_ratio(&d.pmf(&y)),
                "class": class,
                "label": d.gamma(&y).ok(),
            });
            emit(out, fmt(Format::Json), &v, || text_of(&v))?;
        }
        Command::Sample { lift, count, trace } => {
            let d = load_lift(lift)?;
            for i in 0..*count {
                let t = draw_indexed(&d, seed, i);
                if *trace {
                    writeln!(out, "{}", describe_trace(&t, d.n()))?;
                } else {
                    writeln!(out, "{}", t.output)?;
                }
            }
        }
        Command::PmfCheck {
            lift,
            corrupt_point,
        } => {
            let d = load_lift(lift)?;
            let mut sampled = sampler_exact_pmf(&d, lift.budget.saturating_mul(10))?;
            if let Some(p) = corrupt_point {
                let y: LiftedPoint = p.parse()?;
                *sampled.entry(y.to_string()).or_default() +=
                    BigRational::new(1.into(), 1000.into());
            }
            let defined = definition_pmf(&d, lift.budget)?;
            let total: BigRational = sampled.values().cloned().sum();
            match first_pmf_difference(&sampled, &defined) {
                Some((point, a, b)) => {
                    writeln!(
                        out,
                        "differs at {point}: sampler {}, definition {}",
                        fmt_ratio(&a),
                        fmt_ratio(&b)
                    )?;
                    return Err(CheckFailed(format!("pmf mismatch at {point}")).into());
                }
                None => {
                    if total != BigRational::from_integer(1.into()) {
                        return Err(CheckFailed(format!(
                            "sampler mass totals {}",
                            fmt_ratio(&total)
                        ))
                        .into());
                    }
                    writeln!(
                        out,
                        "pmf-check: {} support points agree, total 1",
                        defined.len()
                    )?;
                }
            }
        }
        Command::Dist {
            lift,
            dnf,
            dnf_file,
        } => {
            let d = load_lift(lift)?;
            let text = match (dnf, dnf_file) {
                (Some(t), _) => t.clone(),
                (None, Some(p)) => {
                    fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?
                }
                (None, None) => bail!("one of --dnf or --dnf-file is required"),
            };
            let f: Dnf = text.trim().parse()?;
            let report = dist_exact(&d, &f, lift.budget)?;
            let v = report.to_json();
            emit(out, fmt(Format::Json), &v, || text_of(&v))?;
        }
        Command::Verify {
            suite,
            instance,
            ell,
            corpus,
            max_candidates,
            budget,
        } => {
            let targets: Vec<(String, SetCoverInstance)> = match instance {
                Some(p) => vec![(p.display().to_string(), load_instance(p)?)],
                None => desk_instances()
                    .into_iter()
                    .map(|s| (s.name.to_string(), s.instance))
                    .collect(),
            };
            let ells: Vec<usize> = match ell {
                Some(e) => vec![*e],
                None => SUITE_ELLS.to_vec(),
            };
            let jobs: Vec<(String, SetCoverInstance, usize)> = targets
                .iter()
                .flat_map(|(name, inst)| ells.iter().map(move |&e| (name.clone(), inst.clone(), e)))
                .collect();
            let results: Vec<Result<(String, Vec<CheckOutcome>)>> = jobs
                .par_iter()
                .map(|(name, inst, e)| {
                    let d = LiftedDistribution::new(inst.clone(), *e)?;
                    let oracle = Oracle::new(d.clone(), *budget)?;
                    let mut checks = Vec::new();
                    if matches!(suite, SuiteKind::Facts | SuiteKind::All) {
                        checks.extend(verify_facts(&oracle, seed));
                    }
                    if matches!(suite, SuiteKind::Claims | SuiteKind::All) {
                        checks.extend(verify_claims(
                            &oracle,
                            &hypothesis_corpus(&d, seed, *corpus),
                        ));
                    }
                    if matches!(suite, SuiteKind::Lemmas | SuiteKind::All) {
                        checks.extend(verify_lemmas(&oracle, *max_candidates));
                    }
                    Ok((format!("{name} ell={e}"), checks))
                })
                .collect();
            let mut first_failure = None;
            let mut rows = Vec::new();
            for r in results {
                let (label, checks) = r?;
                for c in checks {
                    if c.status == Status::Fail && first_failure.is_none() {
                        first_failure = Some(format!("{label}: {c}"));
                    }
                    rows.push((label.clone(), c));
                }
            }
            match fmt(Format::Text) {
                Format::Text => {
                    for (label, c) in &rows {
                        writeln!(out, "{label}: {c}")?;
                    }
                }
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(&mut *out);
                    w.write_record(["instance", "check", "status", "detail"])?;
                    for (label, c) in &rows {
                        w.write_record([
                            label.as_str(),
                            &c.check,
                            &c.status.to_string(),
                            &c.detail,
                        ])?;
                    }
                    w.flush()?;
                }
                Format::Json => {
                    let v: Vec<Value> = rows
                        .iter()
                        .map(|(label, c)| {
                            let mut j = c.to_json();
                            j["instance"] = json!(label);
                            j
                        })
                        .collect();
                    writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
                }
            }
            if let Some(f) = first_failure {
                return Err(CheckFailed(f).into());
            }
        }
        Command::Falsify {
            lift,
            variant,
            strategy,
            k,
            window,
            iters,
            max_candidates,
        } => {
            let d = load_lift(lift)?;
            let oracle = Oracle::new(d, lift.budget)?;
            let strat = match strategy {
                StrategyKind::Exhaustive1 => Strategy::ExhaustiveSingleTerm,
                StrategyKind::ExhaustiveK => Strategy::ExhaustiveUpToK {
                    k: *k,
                    window: *window,
                },
                StrategyKind::LocalSearch => Strategy::RandomizedLocalSearch {
                    seed,
                    iters: *iters,
                },
            };
            let report = oracle.falsify_error_lemma(*variant, &strat, *max_candidates)?;
            let v = report.to_json();
            emit(out, fmt(Format::Json), &v, || text_of(&v))?;
            if report.verdict == LemmaVerdict::Refuted {
                return Err(CheckFailed(format!("counterexample {}", report.best)).into());
            }
        }
        Command::Learn {
            lift,
            algo,
            learner,
        } => {
            let d = load_lift(lift)?;
            let opt = opt_exact(d.instance()).size;
            let l = make_learner(*algo, learner, opt, d.ell());
            let budget = LearnerBudget {
                examples: learner.examples.unwrap_or_else(|| default_sample_size(&d)),
                steps: learner.steps,
            };
            let mut oracle = SampleOracle::new(&d, seed);
            let res = l.learn(&mut oracle, &budget)?;
            let dist = res
                .hypothesis
                .as_ref()
                .map(|f| dist_exact(&d, f, lift.budget).map(|r| fmt_ratio(&r.dist)))
                .transpose()
                .ok()
                .flatten();
            let stats = json!({
                "learner": l.name(),
                "sample_size": res.sample_size,
                "steps_used": res.steps_used,
                "aborted": res.aborted,
                "hyp_size": res.hypothesis.as_ref().map(Dnf::size),
                "dist": dist,
                "tree": res.tree.as_ref().map(|t| t.to_string()),
            });
            match &res.hypothesis {
                Some(f) => writeln!(out, "{f}")?,
                None => writeln!(out, "aborted")?,
            }
            match fmt(Format::Json) {
                Format::Text => writeln!(out, "{}", text_of(&stats))?,
                _ => writeln!(out, "{stats}")?,
            }
        }
        Command::Reduce {
            lift,
            learner,
            args,
            mode,
            samples,
            size_cap,
            threshold,
        } => {
            let inst = load_instance(&lift.instance)?;
            let opt = opt_exact(&inst).size;
            let l = make_learner(*learner, args, opt, lift.ell);
            let params = reduction_params(
                &inst,
                lift,
                args,
                *mode,
                *samples,
                *size_cap,
                threshold.as_deref(),
                seed,
            )?;
            let verdict = if size_cap.is_some() {
                algorithm_b_proper(&inst, l.as_ref(), &params)?
            } else {
                algorithm_b(&inst, l.as_ref(), &params)?
            };
            let mut v = verdict.to_json();
            v["learner"] = json!(l.name());
            if let Some(f) = &verdict.hypothesis {
                v["hypothesis"] = json!(f.to_string());
            }
            emit(out, fmt(Format::Json), &v, || text_of(&v))?;
        }
        Command::Bench {
            family,
            n,
            opt,
            ell,
            learners,
            reps,
            args,
        } => {
            let mut cases = Vec::new();
            for &nn in n {
                for &o in opt {
                    if o > nn {
                        continue;
                    }
                    for r in 0..*reps {
                        let inst_seed = seed.wrapping_add(cases.len() as u64);
                        let inst = match family {
                            Family::Planted => {
                                planted_instance_with_extras(nn, o, nn - o, inst_seed)?.instance
                            }
                            Family::Random => random_instance(nn, o.max(1), 0.5, inst_seed)?,
                        };
                        let id = match family {
                            Family::Planted => format!("planted-n{nn}-o{o}-r{r}"),
                            Family::Random => format!("random-n{nn}-m{o}-r{r}"),
                        };
                        cases.push((id, inst));
                    }
                }
            }
            let jobs: Vec<(usize, usize, Algo)> = (0..cases.len())
                .flat_map(|c| {
                    ell.iter()
                        .flat_map(move |&e| learners.iter().map(move |&a| (c, e, a)))
                })
                .collect();
            let rows: Vec<Result<[String; 9]>> = jobs
                .par_iter()
                .map(|&(c, e, a)| {
                    let (id, inst) = &cases[c];
                    let o = opt_exact(inst).size;
                    let l = make_learner(a, args, o, e);
                    let lift = Lift {
                        instance: PathBuf::new(),
                        ell: e,
                        budget: DEFAULT_BUDGET,
                    };
                    let params =
                        reduction_params(inst, &lift, args, Mode::Exact, 0, None, None, seed)?;
                    let v = algorithm_b(inst, l.as_ref(), &params)?;
                    let (num, den) = match &v.eta {
                        Some(Eta::Exact(x)) => (x.numer().to_string(), x.denom().to_string()),
                        Some(Eta::Estimate(x)) => {
                            (x.value.numer().to_string(), x.value.denom().to_string())
                        }
                        None => (String::new(), String::new()),
                    };
                    Ok([
                        id.clone(),
                        o.to_string(),
                        e.to_string(),
                        l.name(),
                        v.hypothesis_size()
                            .map(|s| s.to_string())
                            .unwrap_or_default(),
                        num,
                        den,
                        v.answer.to_string(),
                        v.steps_used.to_string(),
                    ])
                })
                .collect();
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record([
                "instance",
                "opt",
                "ell",
                "learner",
                "hyp_size",
                "eta_num",
                "eta_den",
                "verdict",
                "steps_used",
            ])?;
            for r in rows {
                w.write_record(r?)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn reduction_params(
    inst: &SetCoverInstance,
    lift: &Lift,
    args: &LearnerArgs,
    mode: Mode,
    samples: u64,
    size_cap: Option<u64>,
    threshold: Option<&str>,
    seed: u64,
) -> Result<ReductionParams> {
    let mut p = ReductionParams::new(inst, lift.ell);
    p.step_budget = args.steps;
    p.examples = args.examples;
    p.seed = seed;
    p.size_cap = size_cap;
    if let Some(t) = threshold {
        p.eta_threshold = parse_ratio(t).ok_or_else(|| anyhow!("bad threshold {t}"))?;
    }
    p.distance_mode = match mode {
        Mode::Exact => DistanceMode::Exact {
            budget: lift.budget,
        },
        Mode::Sampled => DistanceMode::Sampled {
            count: samples,
            seed: seed.wrapping_add(1),
        },
    };
    Ok(p)
}
