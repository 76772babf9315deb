use std::path::Path;
use std::process::{Command, Output};

use qubit_md::{success_probability, BlochVector, Ensemble, PovmElement};
use qubit_md_cli::report::{SolveOut, VerifyOut};
use qubit_md_cli::EnsembleFile;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qubit-md"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SYMMETRIC: &str = r#"{"members": [
  {"weight": 0.25, "bloch": [0.5, 0, -0.5]},
  {"weight": 0.25, "bloch": [-0.5, 0, -0.5]},
  {"weight": 0.25, "bloch": [0, 0.5, 0.5]},
  {"weight": 0.25, "bloch": [0, -0.5, 0.5]}
]}"#;

#[test]
fn solve_symmetric_example() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "h0.json", SYMMETRIC);
    let out = run(&["solve", &path]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("p_guess 0.426776695"), "{text}");
    assert!(text.contains("branch  Interior(4)"));
    assert!(text.contains("|c_w| < |v_g|"));
}

#[test]
fn json_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for (k, text) in [
        SYMMETRIC,
        r#"{"members": [{"weight": 0.7, "bloch": [0, 0, 1]}, {"weight": 0.3, "bloch": [0, 0, 1]}]}"#,
    ]
    .iter()
    .enumerate()
    {
        let path = write(dir.path(), &format!("e{k}.json"), text);
        let out = run(&["solve", "--json", &path]);
        assert_eq!(out.status.code(), Some(0));
        let report: SolveOut = serde_json::from_slice(&out.stdout).unwrap();
        let ensemble = EnsembleFile::parse(text).unwrap().ensemble(1e-9).unwrap();
        let povm: Vec<PovmElement> = report
            .povm
            .iter()
            .map(|e| PovmElement::new(e.p, BlochVector::from(e.u)))
            .collect();
        let p = success_probability(&ensemble, &povm).unwrap();
        assert!((p - report.p_guess).abs() <= 1e-9);
    }
}

#[test]
fn identical_states_take_the_subset_branch() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "same.json",
        r#"{"members": [{"weight": 0.7, "bloch": [0, 0, 1]}, {"weight": 0.3, "bloch": [0, 0, 1]}]}"#,
    );
    let out = run(&["solve", &path]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("p_guess 0.700000000000"));
    assert!(text.contains("branch  Subset({1})"));
}

#[test]
fn malformed_files_exit_with_parse_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "bad.json",
        "{\"members\": [\n  {\"weight\": 0.5 \"bloch\": [0, 0, 1]}\n]}",
    );
    let out = run(&["solve", &path]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2, column"), "{err}");

    let path = write(
        dir.path(),
        "outside.json",
        r#"{"members": [{"weight": 1, "bloch": [0, 0, 1.5]}]}"#,
    );
    let out = run(&["verify", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("member 1"));

    let out = run(&["solve", &dir.path().join("missing.json").to_string_lossy()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["solve"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_agrees_on_examples() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        SYMMETRIC,
        // l_2 = e_2 exactly
        r#"{"members": [{"weight": 0.6, "bloch": [0, 0, 0]}, {"weight": 0.4, "bloch": [0, 0, 0.5]}]}"#,
        r#"{"members": [{"weight": 0.5, "bloch": [1, 0, 0]}, {"weight": 0.5, "rho": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]}]}"#,
    ];
    for (k, text) in cases.iter().enumerate() {
        let path = write(dir.path(), &format!("v{k}.json"), text);
        let out = run(&["verify", "--json", "--trials", "2000", "--seed", "3", &path]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let report: VerifyOut = serde_json::from_slice(&out.stdout).unwrap();
        assert!(report.discrepancy <= 1e-7);
        assert!(report.sampler_best <= report.solve + 1e-9);
    }
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("sweep.csv");
    let out = run(&["sweep", "--steps", "100", "--out", csv_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "h",
            "p_guess",
            "nonzero_count",
            "branch",
            "closed_form_value",
            "abs_error"
        ]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 101);
    for r in &rows {
        assert!(r[5].parse::<f64>().unwrap() <= 1e-8);
    }
    assert_eq!(&rows[0][2], "4");
    assert_eq!(&rows[100][2], "3");

    let out = run(&["sweep", "--h-min", "0.3", "--h-max", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["sweep", "--h-max", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ensemble_file_round_trip() {
    let ens = Ensemble::from_pairs(&[(0.3, [0.1, 0.2, 0.3]), (0.7, [0.0, -0.5, 0.0])]).unwrap();
    let text = serde_json::to_string(&EnsembleFile::from_ensemble(&ens)).unwrap();
    assert_eq!(EnsembleFile::parse(&text).unwrap().ensemble(1e-9).unwrap(), ens);
}
