mod common;

use std::fs;

use common::{run_cli, stdout, Server};
use pensionlab_core::{ProjectionResult, SweepTable};

fn code(args: &[&str]) -> i32 {
    run_cli(args).status.code().expect("exit code")
}

fn project_json(args: &[&str]) -> ProjectionResult {
    let mut all = vec!["project", "--json"];
    all.extend_from_slice(args);
    let out = run_cli(&all);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_str(&stdout(&out)).unwrap()
}

#[test]
fn ops_from_gross_growth_and_years() {
    let r = project_json(&[
        "--scheme", "ops", "--gross", "110000", "--growth", "9", "--years", "35",
    ]);
    assert_eq!(r.last_drawn_salary.rupees(), 2_245_536);
    assert_eq!(r.monthly_pension.rupees(), 1_122_768);
    let table = stdout(&run_cli(&[
        "project", "--scheme", "ops", "--gross", "110000", "--growth", "9", "--years", "35",
    ]));
    assert!(table.contains("₹11,22,768"), "{table}");
    assert!(table.contains("₹22,45,536"), "{table}");
}

#[test]
fn zero_contributions_pay_nothing() {
    let r = project_json(&[
        "--scheme",
        "nps",
        "--employee-rate",
        "0",
        "--employer-rate",
        "0",
    ]);
    assert_eq!(r.monthly_pension.paise(), 0);
    assert_eq!(r.corpus().unwrap().paise(), 0);
}

#[test]
fn percent_and_rupee_flags_convert() {
    let r = project_json(&["--corpus", "53349262"]);
    assert_eq!(r.monthly_pension.rupees(), 266_746);
    let r = project_json(&[
        "--annuity-share",
        "40",
        "--return",
        "9",
        "--annuity-rate",
        "8",
    ]);
    assert_eq!(
        r.breakdown.unwrap().annuity_share.value().to_string(),
        "0.40"
    );
    assert_eq!(r.annual_return.unwrap().value().to_string(), "0.09");
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["project", "--annuity-share", "110"]), 2);
    assert_eq!(code(&["project", "--return", "-1"]), 2);
    assert_eq!(code(&["project", "--age", "60", "--retire-age", "50"]), 2);
    assert_eq!(
        code(&["project", "--return", "9", "--lifecycle", "moderate"]),
        2
    );
    assert_eq!(code(&["project", "--lifecycle", "reckless"]), 2);
    assert_eq!(
        code(&["project", "--request", "/nonexistent/request.json"]),
        2
    );
    assert_eq!(
        code(&["sweep", "--param", "annuity-share", "--grid", "80,40"]),
        2
    );
    assert_eq!(code(&["sweep", "--param", "annuity-share"]), 2);
    assert_eq!(code(&["project"]), 0);

    // Caps that cannot hold a full allocation: a model failure, not bad input.
    let dir = tempfile::tempdir().unwrap();
    let req = dir.path().join("infeasible.json");
    let mut v = serde_json::to_value(pensionlab_core::ProjectionRequest::new(
        pensionlab_core::Scheme::Nps,
        pensionlab_core::EmployeeProfile::level_10_reference(),
    ))
    .unwrap();
    v["overrides"] = serde_json::json!({
        "lifecycle": "default",
        "caps": { "equity": "0.15", "corporate_debt": "0.30", "government_securities": "0.40",
                  "short_term_debt": "0.10", "alternative": "0.05" }
    });
    fs::write(&req, v.to_string()).unwrap();
    let out = run_cli(&["project", "--request", req.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn one_point_sweep_matches_project() {
    let out = run_cli(&[
        "sweep",
        "--param",
        "annuity-share",
        "--grid",
        "75",
        "--json",
    ]);
    assert!(out.status.success());
    let table: SweepTable = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(table.rows.len(), 1);
    assert_eq!(
        table.rows[0].result.as_ref().unwrap(),
        &project_json(&["--annuity-share", "75"])
    );
}

#[test]
fn lifecycle_sweep_reports_weighted_returns() {
    let out = run_cli(&[
        "sweep",
        "--param",
        "lifecycle",
        "--grid",
        "default,conservative,moderate,aggressive",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let returns: Vec<&str> = text
        .lines()
        .skip(1)
        .filter_map(|l| l.split_whitespace().last())
        .take(4)
        .collect();
    assert_eq!(returns, ["7.90", "8.20", "8.95", "9.50"], "{text}");
}

#[test]
fn sweep_csv_file_matches_service_export() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("shares.csv");
    let out = run_cli(&[
        "sweep",
        "--param",
        "annuity-share",
        "--grid",
        "40,50,60,70,75,80",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let local = fs::read_to_string(&csv).unwrap();
    assert_eq!(local.lines().count(), 7);

    let server = Server::start(&dir.path().join("s.jsonl"));
    let remote_csv = dir.path().join("remote.csv");
    let out = run_cli(&[
        "sweep",
        "--param",
        "annuity-share",
        "--grid",
        "40,50,60,70,75,80",
        "--csv",
        remote_csv.to_str().unwrap(),
        "--remote",
        &server.root,
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(fs::read_to_string(&remote_csv).unwrap(), local);
}

#[test]
fn remote_validation_error_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let server = Server::start(&dir.path().join("s.jsonl"));
    let req = dir.path().join("bad.json");
    let mut v = serde_json::to_value(pensionlab_core::ProjectionRequest::new(
        pensionlab_core::Scheme::Ops,
        pensionlab_core::EmployeeProfile::level_10_reference(),
    ))
    .unwrap();
    v["profile"]["retirement_age"] = 20.into();
    fs::write(&req, v.to_string()).unwrap();
    // Flags are validated before dispatch, so local and remote agree.
    assert_eq!(code(&["project", "--request", req.to_str().unwrap()]), 2);
    assert_eq!(
        code(&[
            "project",
            "--request",
            req.to_str().unwrap(),
            "--remote",
            &server.root
        ]),
        2
    );
    assert_eq!(code(&["project", "--remote", "http://127.0.0.1:9"]), 1);
}

#[test]
fn reproduce_is_deterministic_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let out = run_cli(&["reproduce-paper", "--out", d.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
        assert!(stdout(&out).contains("OPS pension 1122768: PASS"));
    }
    let mut names: Vec<_> = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 10);
    for n in names {
        assert_eq!(
            fs::read(a.join(&n)).unwrap(),
            fs::read(b.join(&n)).unwrap(),
            "{n:?}"
        );
    }
}

#[test]
fn reproduce_effective_annual_flags_headline_delta() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_cli(&[
        "reproduce-paper",
        "--out",
        dir.path().to_str().unwrap(),
        "--convention",
        "effective-annual",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let summary = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    let line = summary
        .lines()
        .find(|l| l.contains("effective_annual+due [selected]"))
        .expect("selected headline line");
    assert!(
        line.contains("-2.77%") && line.contains("informational"),
        "{line}"
    );
    assert!(summary.contains("tables convention: effective_annual+due"));
}

#[test]
fn reproduce_into_unwritable_dir_fails() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("not-a-dir");
    fs::write(&file, "x").unwrap();
    let out = run_cli(&[
        "reproduce-paper",
        "--out",
        file.join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("creating"));
}
