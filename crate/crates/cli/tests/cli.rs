use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_monolift"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_instance(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn cross(dir: &TempDir) -> String {
    write_instance(
        dir.path(),
        "cross.json",
        r#"{"n": 2, "universe": ["01", "10"]}"#,
    )
    .to_string_lossy()
    .into_owned()
}

#[test]
fn verify_facts_on_desk_suite_exits_zero() {
    let o = run(&["verify", "--suite", "facts"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.contains("PASS")), "{text}");
    assert_eq!(text.lines().count(), 6 * 2 * 6);
}

#[test]
fn verify_claims_on_one_instance() {
    let dir = TempDir::new().unwrap();
    let inst = cross(&dir);
    let o = run(&[
        "verify",
        "--suite",
        "claims",
        "--instance",
        &inst,
        "--ell",
        "5",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.as_array().unwrap().iter().all(|c| c["status"] != "FAIL"));
}

#[test]
fn pmf_check_passes_and_corruption_is_caught() {
    let dir = TempDir::new().unwrap();
    let inst = cross(&dir);
    let ok = run(&["pmf-check", "--instance", &inst, "--ell", "3"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = run(&[
        "pmf-check",
        "--instance",
        &inst,
        "--ell",
        "3",
        "--corrupt-point",
        "110.011",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(
        stdout(&bad).contains("differs at 110.011"),
        "{}",
        stdout(&bad)
    );
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(run(&["build", "--nope"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn missing_instance_file_is_an_input_error() {
    let o = run(&["build", "--instance", "/nonexistent/x.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sample_is_reproducible_across_workers() {
    let dir = TempDir::new().unwrap();
    let inst = cross(&dir);
    let a = run(&[
        "--seed",
        "9",
        "sample",
        "--instance",
        &inst,
        "--count",
        "50",
    ]);
    let b = run(&[
        "--seed",
        "9",
        "--workers",
        "2",
        "sample",
        "--instance",
        &inst,
        "--count",
        "50",
    ]);
    let c = run(&[
        "--seed",
        "10",
        "sample",
        "--instance",
        &inst,
        "--count",
        "50",
    ]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(stdout(&a).lines().count(), 50);
    for line in stdout(&a).lines() {
        let blocks: Vec<&str> = line.split('.').collect();
        assert_eq!(blocks.len(), 2);
        assert!(blocks.iter().all(|b| b.len() == 5));
    }
}

#[test]
fn pmf_of_top_and_off_points() {
    let dir = TempDir::new().unwrap();
    let inst = cross(&dir);
    let o = run(&["pmf", "--instance", &inst, "--point", "11100.11010"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["mass"], "1/200");
    assert_eq!(v["label"], true);
    let o = run(&["pmf", "--instance", &inst, "--point", "11111.11010"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["mass"], "0/1");
    assert_eq!(v["class"], "off");
}

#[test]
fn dist_reports_lowest_terms() {
    let dir = TempDir::new().unwrap();
    let inst = cross(&dir);
    let o = run(&[
        "dist",
        "--instance",
        &inst,
        "--ell",
        "3",
        "--dnf",
        "+1.1 +1.2 | +1.1 +1.3 | +1.2 +1.3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // Majority of block 1 is wrong on the Bottom cell where u_1 = 1.
    assert_eq!(v["dist"], "1/4");
}

#[test]
fn falsify_v16_confirms_on_cross() {
    let dir = TempDir::new().unwrap();
    let inst = cross(&dir);
    let o = run(&[
        "falsify",
        "--instance",
        &inst,
        "--ell",
        "5",
        "--variant",
        "v16",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "Confirmed");
    assert_eq!(v["best_dist"], "11/25");
    assert_eq!(v["size_budget"], 1);
}

#[test]
fn reduce_yes_and_no() {
    let dir = TempDir::new().unwrap();
    let inst = cross(&dir);
    let yes = run(&[
        "reduce",
        "--instance",
        &inst,
        "--ell",
        "3",
        "--learner",
        "junta",
        "--steps",
        "1e7",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&yes.stdout).unwrap();
    assert_eq!(v["answer"], "Yes");
    assert_eq!(v["eta"]["exact"], "0/1");
    let no = run(&[
        "reduce",
        "--instance",
        &inst,
        "--ell",
        "5",
        "--learner",
        "greedy",
        "--cap",
        "1",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&no.stdout).unwrap();
    assert_eq!(v["answer"], "No");
    assert_eq!(v["reason"], "EtaAboveThreshold");
    let gated = run(&[
        "reduce",
        "--instance",
        &inst,
        "--ell",
        "3",
        "--size-cap",
        "2",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&gated.stdout).unwrap();
    assert_eq!(v["reason"], "SizeCapExceeded");
    assert!(v["eta"].is_null());
}

#[test]
fn learn_prints_hypothesis_then_stats() {
    let dir = TempDir::new().unwrap();
    let inst = cross(&dir);
    let o = run(&[
        "learn",
        "--instance",
        &inst,
        "--ell",
        "3",
        "--algo",
        "junta",
    ]);
    let text = stdout(&o);
    let mut lines = text.lines();
    let hyp = lines.next().unwrap();
    assert!(hyp.starts_with('+') || hyp.starts_with('-'));
    let stats: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(stats["dist"], "0/1");
    assert_eq!(stats["aborted"], false);
}

#[test]
fn bench_csv_header_and_determinism() {
    let args = [
        "--seed", "4", "bench", "--n", "2,3", "--opt", "1,2", "--ell", "3",
    ];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0));
    let text = stdout(&a);
    assert_eq!(
        text.lines().next().unwrap(),
        "instance,opt,ell,learner,hyp_size,eta_num,eta_den,verdict,steps_used"
    );
    assert_eq!(text.lines().count(), 1 + 4 * 2);
    let b = run(&[&["--workers", "1"][..], &args].concat());
    assert_eq!(a.stdout, b.stdout);
    for row in text.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        let expect = if cols[3].starts_with("junta") {
            "Yes"
        } else {
            "No"
        };
        assert_eq!(cols[7], expect, "{row}");
    }
}

#[test]
fn gen_and_solve_round_trip() {
    let o = run(&[
        "--seed", "3", "gen", "--family", "planted", "--n", "5", "--opt", "3", "--m", "4",
    ]);
    let dir = TempDir::new().unwrap();
    let p = write_instance(dir.path(), "g.json", &stdout(&o));
    let s = run(&["solve-cover", "--instance", p.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&s.stdout).unwrap();
    assert_eq!(v["opt"], 3);
    assert!(v["greedy_size"].as_u64().unwrap() >= 3);
}
