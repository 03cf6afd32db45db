use persuade_cli::commands;
use persuade_cli::sweep::{emit_report, fit_power_law, render_report, run_sweep, Format, SweepResult, CSV_HEADER};
use persuade_cli::{build_scheme, family_graph, CliError, Family, Mode, SchemeName};
use std::path::Path;
use std::process::{Command, Output};

fn persuade(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_persuade")).current_dir(dir).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn pipeline_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = persuade(d, &["gen", "double-star", "--size", "3", "--mode", "rational", "--out", "g.json"]);
    assert_eq!(code(&gen), 0, "{}", String::from_utf8_lossy(&gen.stderr));

    let bench = persuade(d, &["bench", "g.json", "--mode", "rational"]);
    let report: serde_json::Value = serde_json::from_slice(&bench.stdout).unwrap();
    assert_eq!((report["opt"].as_str(), report["opt_stable"].as_str(), report["pos"].as_str()), (Some("2"), Some("4"), Some("2")));

    let built = persuade(d, &["construct", "g.json", "--scheme", "improve-unit", "--mode", "rational", "--out", "s.json"]);
    assert_eq!(code(&built), 0);
    let verified = persuade(d, &["verify", "g.json", "s.json", "--mode", "rational"]);
    assert_eq!(code(&verified), 0);
    let report: serde_json::Value = serde_json::from_slice(&verified.stdout).unwrap();
    assert_eq!(report["persuasive"], true);
    assert_eq!(report["cost"], "1681/484");

    let mc = persuade(d, &["verify", "g.json", "s.json", "--mc", "50000", "--seed", "3"]);
    assert_eq!(code(&mc), 0, "{}", String::from_utf8_lossy(&mc.stdout));

    assert_eq!(code(&persuade(d, &["construct", "g.json", "--scheme", "binary-unit"])), 2);
    assert_eq!(code(&persuade(d, &["verify", "g.json", "s.json", "--mc", "100"])), 2);
    assert_eq!(code(&persuade(d, &["construct", "missing.json", "--scheme", "noinfo"])), 2);
    assert_eq!(code(&persuade(d, &["construct", "g.json", "--scheme", "nonsense"])), 2);

    std::fs::write(d.join("bad.json"), r#"{"space": [0, 1], "components": [{"weight": 1, "kind": "explicit_subset", "set": [0, 1], "on": 1, "off": 0}]}"#).unwrap();
    let rejected = persuade(d, &["verify", "g.json", "bad.json", "--mode", "rational"]);
    assert_eq!(code(&rejected), 4);
    let body: serde_json::Value = serde_json::from_slice(&rejected.stdout).unwrap();
    assert_eq!(body["persuasive"], false);

    let big = persuade(d, &["gen", "double-star", "--size", "9", "--out", "big.json"]);
    assert_eq!(code(&big), 0);
    assert_eq!(code(&persuade(d, &["construct", "big.json", "--scheme", "match-stable"])), 3);
    assert_eq!(code(&persuade(d, &["lowerbound", "big.json", "--grid", "0,1/2,1"])), 3);
}

#[test]
fn lowerbound_command() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    persuade(d, &["gen", "double-star", "--size", "2", "--out", "g.json"]);
    std::fs::write(d.join("f.json"), r#"{"f": [0, 0, 0]}"#).unwrap();
    let ok = persuade(d, &["lowerbound", "g.json", "--grid", "0,0.5,1", "--f", "f.json", "--C", "0"]);
    assert_eq!(code(&ok), 0);
    let bad = persuade(d, &["lowerbound", "g.json", "--grid", "0,0.5,1", "--f", "f.json", "--C", "0.1"]);
    assert_eq!(code(&bad), 4);
    let v: serde_json::Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(v["certified"], false);
    let searched = persuade(d, &["lowerbound", "g.json", "--grid", "0,1/2,3/4,1"]);
    assert_eq!(code(&searched), 0);
    let v: serde_json::Value = serde_json::from_slice(&searched.stdout).unwrap();
    assert_eq!(v["certified"], true);
}

#[test]
fn gen_mix_and_families() {
    let dir = tempfile::tempdir().unwrap();
    let out = persuade(dir.path(), &["gen", "mix", "--components", "path3;edge(1/2)", "--mode", "rational"]);
    let g: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(g["n"], 5);
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"1/2\""));
    for fam in ["double-star", "k-star-clique:3", "triangle-centers", "clique-leaves", "light-clique"] {
        let out = persuade(dir.path(), &["gen", fam, "--size", "12"]);
        assert_eq!(code(&out), 0, "{fam}");
    }
    assert_eq!(code(&persuade(dir.path(), &["gen", "nope", "--size", "3"])), 2);
}

#[test]
fn identical_commands_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["sweep", "--family", "double-star", "--sizes", "3..8", "--scheme", "binary-unit", "--seed", "11"];
    let a = persuade(d, &args);
    let b = persuade(d, &args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    persuade(d, &["gen", "double-star", "--size", "3", "--out", "g.json"]);
    let c1 = persuade(d, &["construct", "g.json", "--scheme", "binary-unit", "--seed", "5"]);
    let c2 = persuade(d, &["construct", "g.json", "--scheme", "binary-unit", "--seed", "5"]);
    assert_eq!(c1.stdout, c2.stdout);
    std::fs::write(d.join("s.json"), &c1.stdout).unwrap();
    let m1 = persuade(d, &["verify", "g.json", "s.json", "--mc", "20000", "--seed", "9"]);
    let m2 = persuade(d, &["verify", "g.json", "s.json", "--mc", "20000", "--seed", "9"]);
    assert_eq!(m1.stdout, m2.stdout);
}

fn small_sweep() -> SweepResult {
    run_sweep(&Family::DoubleStar, &[6, 2, 4, 3], SchemeName::BinaryUnit, 1, Mode::Rational).unwrap()
}

#[test]
fn csv_report_contract() {
    let result = small_sweep();
    let csv = String::from_utf8(render_report(&result, Format::Csv).unwrap()).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "family,k,n,opt,opt_ir,opt_stable,scheme,cost,persuasive");
    assert_eq!(CSV_HEADER.len(), 9);
    assert_eq!(lines.next().unwrap(), format!("double-star,2,6,2,2,3,binary-unit,{},true", result.rows[0].cost));
    assert_eq!(result.rows.iter().map(|r| r.k).collect::<Vec<_>>(), vec![2, 3, 4, 6]);
}

#[test]
fn reports_round_trip_and_reemit_identically() {
    let result = small_sweep();
    let json = render_report(&result, Format::Json).unwrap();
    let back: SweepResult = serde_json::from_slice(&json).unwrap();
    assert_eq!(back, result);
    assert_eq!(render_report(&back, Format::Json).unwrap(), json);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.csv");
    emit_report(&result, &p, Format::Csv).unwrap();
    let first = std::fs::read(&p).unwrap();
    emit_report(&back, &p, Format::Csv).unwrap();
    assert_eq!(std::fs::read(&p).unwrap(), first);
    assert!(matches!(emit_report(&result, &dir.path().join("no/such/dir/r.csv"), Format::Csv), Err(CliError::Input(_))));
}

#[test]
fn sweep_rows_reverify_from_scheme_json() {
    for (family, sizes, name) in [
        (Family::DoubleStar, vec![2, 3, 5], SchemeName::BinaryUnit),
        (Family::DoubleStar, vec![2, 3], SchemeName::ImproveUnit),
        (Family::TriangleCenters, vec![2, 5], SchemeName::TernaryMinWeight),
        (Family::TriangleCenters, vec![2], SchemeName::ImproveWeighted),
    ] {
        let result = run_sweep(&family, &sizes, name, 4, Mode::Rational).unwrap();
        for row in &result.rows {
            assert!(row.persuasive);
            let g = family_graph(&family, row.k).unwrap();
            let built = build_scheme::<persuade_core::BigRational>(&g, name, 4, None).unwrap();
            let text = serde_json::to_string(&built.scheme.to_json()).unwrap();
            let out = commands::verify(&g, &text, None, None, Mode::Rational).unwrap();
            assert!(out.failure.is_none(), "{} k={}", name.name(), row.k);
        }
    }
}

#[test]
fn sweep_edge_cases() {
    assert!(matches!(run_sweep(&Family::DoubleStar, &[], SchemeName::NoInfo, 0, Mode::Float), Err(CliError::Input(_))));
    let r = run_sweep(&Family::DoubleStar, &[3, 9], SchemeName::MatchStable, 0, Mode::Float).unwrap();
    assert_eq!(r.rows.len(), 1);
    assert_eq!(r.absent, vec![9]);
    let r = run_sweep(&Family::DoubleStar, &[3, 9], SchemeName::NoInfo, 0, Mode::Float).unwrap();
    assert_eq!(r.rows[1].opt_stable, None);
    assert_eq!(r.rows[0].opt_stable, Some(4.0));
}

#[test]
fn power_law_fit() {
    let xs = [2.0, 4.0, 8.0, 16.0];
    let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(0.5)).collect();
    let (slope, se) = fit_power_law(&xs, &ys).unwrap();
    assert!((slope - 0.5).abs() < 1e-12 && se < 1e-12);
    let noisy = [1.0, 2.2, 2.9, 4.1];
    let (s, se) = fit_power_law(&xs, &noisy).unwrap();
    assert!(s > 0.5 && s < 1.0 && se > 0.0);
    assert!(fit_power_law(&[1.0], &[1.0]).is_none());
    assert!(fit_power_law(&[2.0, 2.0], &[1.0, 3.0]).is_none());
}
