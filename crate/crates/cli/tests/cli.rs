use std::process::Command;

fn lcs(args: &[&str]) -> (bool, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lcs")).args(args).output().expect("spawn lcs");
    (
        out.status.success(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn construct_summary_reports_parameters() {
    let (ok, out, _) = lcs(&["construct", "--code", "lcs:1:3"]);
    assert!(ok);
    assert!(out.contains("n: 15"));
    assert!(out.contains("k: 3"));
}

#[test]
fn construct_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("code.txt");
    let (ok, _, _) = lcs(&["construct", "--code", "surface:2:3", "--format", "text", "--out", path.to_str().unwrap()]);
    assert!(ok);
    assert!(!std::fs::read_to_string(path).unwrap().is_empty());
}

#[test]
fn distance_table() {
    let (ok, out, _) = lcs(&["distance", "--ell-max", "1", "--lift-max", "4"]);
    assert!(ok);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "ell,L,d_X,d_Z,method");
    assert!(rows.contains(&"1,3,3,3,exact"));
    assert!(rows.contains(&"1,4,3,3,exact"));
}

#[test]
fn count_failures_small_weights() {
    let (ok, out, _) = lcs(&["count-failures", "--code", "lcs:1:3", "--weight", "1"]);
    assert!(ok);
    assert!(out.lines().any(|l| l.ends_with(",1,0")));
}

#[test]
fn count_failures_guard_trips() {
    let (ok, _, err) = lcs(&["count-failures", "--code", "lcs:2:3", "--weight", "6", "--guard", "1000"]);
    assert!(!ok);
    assert!(!err.is_empty());
}

#[test]
fn sample_is_seeded_and_reproducible() {
    let args = ["sample", "--code", "lcs:1:3", "--p", "0.06", "--shots", "300", "--seed", "9"];
    let (ok, a, _) = lcs(&args);
    assert!(ok);
    let (_, b, _) = lcs(&args);
    assert_eq!(a, b);
}

#[test]
fn sample_requires_seed() {
    let (ok, _, _) = lcs(&["sample", "--code", "lcs:1:3", "--p", "0.06"]);
    assert!(!ok);
}

#[test]
fn sample_config_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("curve.csv");
    let cfg = dir.path().join("exp.toml");
    let grid: Vec<String> = (0..9).map(|i| format!("{}", 0.05 + 0.0075 * i as f64)).collect();
    std::fs::write(
        &cfg,
        format!(
            "code = \"lcs:1:3\"\nnoise = \"code_capacity\"\ndecoder = \"mle\"\np_grid = [{}]\nshots = 4000\nseed = 3\noutput = \"{}\"\n",
            grid.join(", "),
            csv.display()
        ),
    )
    .unwrap();
    let (ok, _, err) = lcs(&["sample", "--config", cfg.to_str().unwrap(), "--seed", "3"]);
    assert!(ok, "{err}");
    assert!(csv.with_extension("json").exists());
    let (ok, out, err) = lcs(&["analyze", "pseudo-threshold", "--csv", csv.to_str().unwrap(), "--k", "3"]);
    assert!(ok, "{err}");
    let value: f64 = out.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((0.06..0.10).contains(&value), "{value}");
}

#[test]
fn crossing_needs_two_curves() {
    let (ok, _, _) = lcs(&["analyze", "crossing", "--csv", "a.csv"]);
    assert!(!ok);
}

#[test]
fn gates_verify_passes() {
    let (ok, out, _) = lcs(&["gates", "verify", "--l", "1", "--L", "4"]);
    assert!(ok);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 4);
}

#[test]
fn circuit_commands() {
    let (ok, out, _) = lcs(&["circuit", "fault-distance", "--code", "lcs:1:3", "--cycles", "2"]);
    assert!(ok);
    assert!(out.lines().nth(1).unwrap().ends_with(",3"));
    let (ok, out, _) = lcs(&["circuit", "build", "--code", "lcs:1:3", "--cycles", "1", "--dem"]);
    assert!(ok);
    assert!(out.lines().all(|l| l.starts_with("error(")));
    let (ok, out, _) = lcs(&["circuit", "sample", "--code", "lcs:1:3", "--cycles", "1", "--p", "0.001", "--shots", "200", "--seed", "1"]);
    assert!(ok);
    assert_eq!(out.lines().count(), 2);
}

#[test]
fn bad_code_spec_is_an_error() {
    let (ok, _, err) = lcs(&["construct", "--code", "torus:1:3"]);
    assert!(!ok);
    assert!(!err.is_empty());
}

#[test]
fn crossing_of_two_sampled_curves() {
    let dir = tempfile::tempdir().unwrap();
    let mut paths = Vec::new();
    for code in ["lcs:1:3", "lcs:2:3"] {
        let path = dir.path().join(format!("{}.csv", code.replace(':', "_")));
        let (ok, _, err) = lcs(&[
            "sample", "--code", code, "--p", "0.06,0.07,0.08,0.09,0.1,0.11,0.12", "--shots", "4000", "--seed", "4",
            "--out", path.to_str().unwrap(),
        ]);
        assert!(ok, "{err}");
        paths.push(path);
    }
    let (ok, out, err) = lcs(&["analyze", "crossing", "--csv", paths[0].to_str().unwrap(), "--csv", paths[1].to_str().unwrap()]);
    assert!(ok, "{err}");
    assert!(out.starts_with("crossing,uncertainty"));
}
