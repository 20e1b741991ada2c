use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wigner-ball"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn curve_ground_state_row() {
    let o = run(&[
        "--command",
        "curve",
        "--n",
        "1",
        "--lambda-max",
        "0",
        "--r-min",
        "0",
        "--r-max",
        "1",
        "--r-steps",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row = text
        .lines()
        .find(|l| l.starts_with("0;1.0;"))
        .expect("row for r=1");
    let value: f64 = row.split(';').nth(2).unwrap().parse().unwrap();
    assert!((value - (1.0 - (-1f64).exp())).abs() < 1e-15);
    assert!(row.starts_with("0;1.0;0.63212055882"));
}

#[test]
fn curve_rows_are_sorted_and_deterministic() {
    let args = [
        "--command",
        "curve",
        "--n",
        "2",
        "--lambda-max",
        "2",
        "--r-steps",
        "5",
    ];
    let a = stdout(&run(&args));
    let b = stdout(&run(&args));
    assert_eq!(a, b);
    let rows: Vec<(Vec<u32>, f64)> = a
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(';').collect();
            assert_eq!(f.len(), 3);
            let mu = f[0].split('-').map(|t| t.parse().unwrap()).collect();
            (mu, f[1].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 6 * 5);
    assert!(rows
        .windows(2)
        .all(|w| (&w[0].0, w[0].1) < (&w[1].0, w[1].1)));
    assert_eq!(rows[0].0, vec![0, 0]);
}

#[test]
fn curve_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let o = run(&[
        "--command",
        "curve",
        "--lambda-max",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("mu;r;value\n"));

    let bad = dir.path().join("missing").join("curve.csv");
    let o = run(&["--command", "curve", "--out", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot write output"));
}

#[test]
fn invalid_ranges_are_usage_errors() {
    let o = run(&["--command", "curve", "--r-min", "2", "--r-max", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--r-max"));
    let o = run(&["--command", "curve", "--r-steps", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["--command", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn lemma2_reports_exact_identity() {
    let o = run(&[
        "--command",
        "verify-lemma2",
        "--n",
        "2",
        "--lambda-max",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("PASS: 5 eigenvalue classes, exact identity"));
    assert!(text.contains("tolerance:"));
    assert!(text.contains("worst residual:"));
}

#[test]
fn verification_commands_pass_and_report() {
    for args in [
        vec![
            "--command",
            "verify-lemma1",
            "--n",
            "2",
            "--lambda-max",
            "3",
            "--r-min",
            "0.5",
            "--r-max",
            "2",
            "--r-steps",
            "3",
        ],
        vec![
            "--command",
            "verify-theorem1",
            "--n",
            "3",
            "--lambda-max",
            "4",
        ],
        vec![
            "--command",
            "nonmonotone",
            "--n",
            "1",
            "--lambda-max",
            "2",
            "--r-steps",
            "101",
        ],
        vec![
            "--command",
            "rotation-chain",
            "--n",
            "3",
            "--lambda-max",
            "4",
            "--r-steps",
            "4",
        ],
        vec![
            "--command",
            "oracle-check",
            "--n",
            "2",
            "--lambda-max",
            "3",
            "--mc-samples",
            "20000",
            "--seed",
            "7",
        ],
    ] {
        let o = run(&args);
        let text = stdout(&o);
        assert_eq!(o.status.code(), Some(0), "{args:?}\n{text}{}", stderr(&o));
        assert!(text.contains("tolerance:"), "{args:?}");
        assert!(text.contains("worst residual:"), "{args:?}");
        assert!(text.lines().last().unwrap().starts_with("PASS"), "{args:?}");
    }
}

#[test]
fn failed_verification_exits_one() {
    // I_1 only dips below r = 1/√2, so a grid starting at r = 2 sees no drop.
    let o = run(&[
        "--command",
        "nonmonotone",
        "--n",
        "1",
        "--lambda-max",
        "1",
        "--r-min",
        "2",
        "--r-max",
        "3",
        "--r-steps",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn energy_from_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.txt");
    std::fs::write(
        &path,
        "# superposition of H_(0,0) and H_(1,0)\n0 0 1 0\n1 0 0 1\n",
    )
    .unwrap();
    let o = run(&[
        "--command",
        "energy",
        "--state",
        path.to_str().unwrap(),
        "--r-min",
        "0",
        "--r-max",
        "1",
        "--r-steps",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"));
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    let (r, e) = last.split_once(';').unwrap();
    assert_eq!(r, "1.0");
    let e: f64 = e.parse().unwrap();
    // I_(0,0)(1) = 1 − 2/e, I_(1,0)(1) = 1 − 3/e, equal weights
    let g = 1.0 - 2.0 * (-1f64).exp();
    let h = 1.0 - 3.0 * (-1f64).exp();
    assert!((e - 0.5 * (g + h)).abs() < 1e-14, "{e}");

    let o = run(&[
        "--command",
        "energy",
        "--state",
        path.to_str().unwrap(),
        "--n",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(2));

    std::fs::write(&path, "0 0 one 0\n").unwrap();
    let o = run(&["--command", "energy", "--state", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1"));

    let o = run(&[
        "--command",
        "energy",
        "--state",
        dir.path().join("absent").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot read state file"));
}
