use std::process::{Command, Output};

fn wpsk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wpsk")).args(args).output().expect("spawn wpsk")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn gaussian_sweep_has_seventeen_ok_rows() {
    let o = wpsk(&["convergence", "--kernel", "gaussian", "--epsilon", "1", "--norm", "inf", "--n-min", "9", "--n-max", "25"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], wpsk::harness::CSV_HEADER);
    assert_eq!(lines.len(), 18);
    for (i, l) in lines[1..].iter().enumerate() {
        let cols: Vec<&str> = l.split(',').collect();
        assert_eq!(cols.len(), 12);
        assert_eq!(cols[5], (9 + i).to_string());
        assert_eq!(cols[11], "ok");
    }
}

#[test]
fn csv_is_byte_stable() {
    let args = ["convergence", "--norm", "l2", "--nodes", "equispaced", "--n-min", "9", "--n-max", "11"];
    let a = wpsk(&args);
    let b = wpsk(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).lines().skip(1).all(|l| l.ends_with(",ok")));
}

#[test]
fn random_nodes_record_seed() {
    let o = wpsk(&["convergence", "--nodes", "random", "--seed", "7", "--n-min", "9", "--n-max", "9"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# seed=7\n"));
    assert!(text.lines().nth(2).unwrap().contains(",random,9,"));
}

#[test]
fn node_file_fixes_n() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nodes.txt");
    let xs: Vec<String> = (0..10).map(|i| format!("{}", -0.95 + 0.2 * i as f64)).collect();
    std::fs::write(&path, xs.join("\n")).unwrap();
    let o = wpsk(&["convergence", "--nodes", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert!(text.contains(",file,10,"));
}

#[test]
fn output_file_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let o = wpsk(&["convergence", "--n-min", "9", "--n-max", "9", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with(wpsk::harness::CSV_HEADER));
    assert!(stdout(&o).contains("empirical"));
}

#[test]
fn inapplicable_rows_need_flag() {
    let o = wpsk(&["convergence", "--n-min", "2", "--n-max", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let o = wpsk(&["convergence", "--n-min", "2", "--n-max", "3", "--allow-inapplicable"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().skip(1).all(|l| l.ends_with(",not-applicable")));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["convergence", "--n-min", "10", "--n-max", "9"],
        vec!["verify", "--n-min", "5", "--n-max", "4"],
        vec!["convergence", "--precision-digits", "20"],
        vec!["convergence", "--kernel", "matern"],
        vec!["convergence", "--epsilon", "-1"],
        vec!["compare-weighted", "--kernel", "bessel"],
        vec!["convergence", "--nodes", "/nonexistent/nodes.txt"],
        vec!["frobnicate"],
    ] {
        let o = wpsk(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn power_negative_control_is_expected_failure() {
    let o = wpsk(&["verify", "--kernel", "power", "--beta", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("expected-failure"));
    assert!(!text.contains("VIOLATED"));
}

#[test]
fn compare_weighted_reports_slope() {
    let o = wpsk(&["compare-weighted", "--n-min", "12", "--n-max", "12"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("# slope=n/a"));
    let o = wpsk(&["compare-weighted", "--n-min", "10", "--n-max", "14"]);
    let slope = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("# slope="))
        .and_then(|r| r.split_whitespace().next())
        .unwrap()
        .parse::<f64>()
        .unwrap();
    assert!(slope > 0.0);
}

#[test]
fn constants_and_multivariate() {
    let o = wpsk(&["constants", "--kernel", "exponential", "--epsilon", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("m_L"));
    let o = wpsk(&["constants", "--kernel", "power", "--beta", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    let o = wpsk(&["multivariate-demo", "--n-max", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);
}
