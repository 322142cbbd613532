use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use coherence_core::linalg::{c64, CMatrix};
use coherence_core::{
    CovariantChannel, DensityMatrix, EnergyValue, LabeledHamiltonian, SymbolContext,
};
use coherence_lab::config::save_state;
use coherence_lab::format::{self, BundleFile, ChannelFile};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coherence-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ctx() -> SymbolContext {
    SymbolContext::new(["1", "sqrt2"]).unwrap()
}

fn e(a: i64, b: i64) -> EnergyValue {
    &EnergyValue::integer(0, a) + &EnergyValue::integer(1, b)
}

fn ham(levels: &[EnergyValue]) -> LabeledHamiltonian {
    LabeledHamiltonian::new(ctx(), levels.to_vec()).unwrap()
}

fn plus(h: LabeledHamiltonian) -> DensityMatrix {
    DensityMatrix::pure(&[c64(1.0, 0.0), c64(1.0, 0.0)], h).unwrap()
}

fn save(dir: &TempDir, name: &str, rho: &DensityMatrix) -> PathBuf {
    let p = dir.path().join(name);
    save_state(&p, rho).unwrap();
    p
}

fn save_channel(dir: &TempDir, name: &str, ch: &CovariantChannel) -> PathBuf {
    let p = dir.path().join(name);
    format::write_json(&p, &ChannelFile::from_channel(ch)).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn counterexample_row_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("ce.csv");
    let o = run(&[
        "counterexample",
        "--m",
        "2",
        "--eps",
        "0.2",
        "--delta",
        "0.01",
        "--csv",
        s(&csv),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("# seed=none covariance_tol="));
    assert_eq!(
        lines.next().unwrap(),
        "m,eps,delta,marginal_dist,correlation,global_dist,f_formula"
    );
    let row: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((row[5] - 0.3862).abs() < 1e-12);
    assert!((row[5] - row[6]).abs() < 1e-12);
    assert!(lines.next().is_none());
}

#[test]
fn counterexample_sweep_has_one_row_per_m() {
    let o = run(&[
        "counterexample",
        "--m",
        "5",
        "--eps",
        "0.1",
        "--delta",
        "0.05",
        "--sweep",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 6);
}

#[test]
fn schedule_lists_conversions() {
    let o = run(&["schedule", "--N", "2", "--k", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("round ")).count(), 4);
    assert!(out.contains("conversions: 4"));
    assert!(out.contains("fresh: true"));
}

#[test]
fn schedule_rejects_single_role() {
    let o = run(&["schedule", "--N", "1", "--k", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn identity_channel_is_covariant() {
    let dir = TempDir::new().unwrap();
    let p = save_channel(
        &dir,
        "identity.json",
        &CovariantChannel::identity(ham(&[e(0, 0), e(1, 0), e(0, 1)])),
    );
    let o = run(&["covariance", s(&p)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "commutator norm: 0e0");
}

#[test]
fn hadamard_channel_is_a_violation() {
    let dir = TempDir::new().unwrap();
    let mut file = ChannelFile::from_channel(&CovariantChannel::identity(ham(&[e(0, 0), e(1, 0)])));
    let r = std::f64::consts::FRAC_1_SQRT_2;
    file.kraus[0].matrix = vec![[r, 0.0], [r, 0.0], [r, 0.0], [-r, 0.0]];
    let p = dir.path().join("h.json");
    format::write_json(&p, &file).unwrap();
    assert_eq!(run(&["covariance", s(&p)]).status.code(), Some(1));
}

#[test]
fn subset_checks_and_verdict() {
    let dir = TempDir::new().unwrap();
    let source = save(&dir, "src.json", &plus(ham(&[e(0, 0), e(2, 0)])));
    let target = save(&dir, "tgt.json", &plus(ham(&[e(0, 0), e(1, 0)])));
    let z = run(&["check-subset", "--variant", "z", s(&target), s(&source)]);
    let q = run(&["check-subset", "--variant", "q", s(&target), s(&source)]);
    assert_eq!(z.status.code(), Some(1));
    assert_eq!(q.status.code(), Some(0));
    let v = run(&["verdict", s(&source), s(&target)]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).starts_with("BLOCKED_Z"));
    let back = run(&["verdict", s(&target), s(&source)]);
    assert!(stdout(&back).starts_with("AMPLIFIABLE"));
}

#[test]
fn modes_print_exact_generators() {
    let dir = TempDir::new().unwrap();
    let h = ham(&[e(0, 0), e(1, 0), e(0, 1)]);
    let rho = DensityMatrix::pure(&[c64(1.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0)], h).unwrap();
    let o = run(&["modes", s(&save(&dir, "s.json", &rho))]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("modes: 3 generators"), "{out}");
    assert!(out.contains("[1=1 sqrt2=0]"));
    assert!(out.contains("[1=0 sqrt2=1]"));
    assert!(out.contains("[1=1 sqrt2=-1]"));
}

#[test]
fn embed_prints_coordinates() {
    let dir = TempDir::new().unwrap();
    let rho = DensityMatrix::maximally_mixed(ham(&[e(0, 0), e(1, 0), e(0, 1), e(1, 1)]));
    let o = run(&["embed", s(&save(&dir, "s.json", &rho))]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("basis: 2 intervals"));
    assert!(
        out.contains("level 3: 1 + sqrt2 -> (1, 1) label 0"),
        "{out}"
    );
}

#[test]
fn measures_of_plus_state() {
    let dir = TempDir::new().unwrap();
    let o = run(&[
        "measures",
        s(&save(&dir, "p.json", &plus(ham(&[e(0, 0), e(1, 0)])))),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let vals: Vec<f64> = stdout(&o)
        .lines()
        .map(|l| l.split(": ").nth(1).unwrap().parse().unwrap())
        .collect();
    assert!((vals[0] - 1.0).abs() < 1e-12);
    assert!((vals[1] - 0.25).abs() < 1e-12);
    assert!((vals[2] - std::f64::consts::LN_2).abs() < 1e-12);
}

#[test]
fn seeded_sweeps_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let state = save(&dir, "p.json", &plus(ham(&[e(0, 0), e(0, 1)])));
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let csv = dir.path().join(format!("m{threads}.csv"));
        let o = bin()
            .env("COHERENCE_LAB_THREADS", threads)
            .args([
                "measures",
                s(&state),
                "--trials",
                "20",
                "--seed",
                "11",
                "--csv",
                s(&csv),
            ])
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        outputs.push(std::fs::read(&csv).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert!(text.starts_with("# seed=11 "));
    assert_eq!(
        text.lines().nth(1).unwrap(),
        "trial,QFI,WY_SKEW,REL_ENT_ASYM"
    );
    assert_eq!(text.lines().count(), 22);

    let other = dir.path().join("other.csv");
    bin()
        .args([
            "measures",
            s(&state),
            "--trials",
            "20",
            "--seed",
            "12",
            "--csv",
            s(&other),
        ])
        .output()
        .unwrap();
    assert_ne!(std::fs::read(&other).unwrap(), outputs[0]);
}

#[test]
fn bad_thread_setting_is_usage_error() {
    let o = bin()
        .env("COHERENCE_LAB_THREADS", "zero")
        .args([
            "counterexample",
            "--m",
            "2",
            "--eps",
            "0.1",
            "--delta",
            "0.1",
        ])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn catalyst_bundle_round_trips() {
    let dir = TempDir::new().unwrap();
    let h = ham(&[e(0, 0), e(1, 0)]);
    let rho = DensityMatrix::diagonal(&[0.7, 0.3], h.clone()).unwrap();
    let mut m = rho.matrix().clone();
    m[(0, 1)] = c64(0.2, 0.1);
    m[(1, 0)] = c64(0.2, -0.1);
    let rho = DensityMatrix::new(m, h.clone()).unwrap();
    let h2 = h.power(2).unwrap();
    let mut swap = CMatrix::zeros(4, 4);
    for (a, b) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        swap[(a, b)] = c64(1.0, 0.0);
    }
    let lambda = CovariantChannel::unitary(swap, h2).unwrap();
    let state = save(&dir, "rho.json", &rho);
    let channel = save_channel(&dir, "lambda.json", &lambda);
    let out = dir.path().join("bundle.json");
    let o = run(&[
        "catalyst",
        "build",
        "--n",
        "2",
        "--state",
        s(&state),
        "--channel",
        s(&channel),
        "--out",
        s(&out),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let b: BundleFile = format::read_json(&out).unwrap();
    assert_eq!(b.n, 2);
    assert_eq!(b.register_dim, 2);
    assert!(b.catalyst_deviation <= 1e-12 && b.system_deviation <= 1e-12);
    let catalyst = b.catalyst.to_state().unwrap();
    assert_eq!(catalyst.dim(), 4);
    b.channel.to_channel().unwrap();
}

#[test]
fn catalyst_with_mismatched_channel_fails() {
    let dir = TempDir::new().unwrap();
    let h = ham(&[e(0, 0), e(1, 0)]);
    let state = save(&dir, "rho.json", &plus(h.clone()));
    let channel = save_channel(&dir, "id.json", &CovariantChannel::identity(h));
    let out = dir.path().join("bundle.json");
    let o = run(&[
        "catalyst",
        "build",
        "--n",
        "3",
        "--state",
        s(&state),
        "--channel",
        s(&channel),
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn parse_failures_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"dim\": 2").unwrap();
    assert_eq!(run(&["modes", s(&bad)]).status.code(), Some(2));
    assert_eq!(
        run(&["modes", s(&dir.path().join("missing.json"))])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["covariance"]).status.code(), Some(2));
}

#[test]
fn explicit_valuation_file_is_used() {
    let dir = TempDir::new().unwrap();
    let v = dir.path().join("v.json");
    std::fs::write(&v, r#"{"1": 2.0, "sqrt2": 1.5}"#).unwrap();
    let p = save(&dir, "p.json", &plus(ham(&[e(0, 0), e(1, 0)])));
    let o = run(&["measures", s(&p), "--valuation", s(&v)]);
    let qfi: f64 = stdout(&o)
        .lines()
        .next()
        .unwrap()
        .split(": ")
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((qfi - 4.0).abs() < 1e-12);
}
