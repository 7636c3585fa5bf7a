use std::path::Path;
use std::process::{Command, Output};

fn rnet(args: &[&str], envs: &[(&str, &str)]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rnet")).args(args).envs(envs.iter().copied()).output().expect("binary runs")
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let out = rnet(&["simulate", "--preset", "desk", "--steps", "20", "--out", dir.to_str().unwrap()], &[]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(read(&a, "simulate.csv"), read(&b, "simulate.csv"));
    assert_eq!(read(&a, "simulate.json"), read(&b, "simulate.json"));
    let csv = read(&a, "simulate.csv");
    assert!(csv.starts_with("# tool: rnet "));
    assert!(csv.contains("# config_sha256: "));
    assert!(!csv.contains('\r'));
    assert_eq!(data_rows(&csv).len(), 21);
}

#[test]
fn decoupled_populations_stay_constant() {
    let out = rnet(&["simulate", "--preset", "decoupled", "--steps", "10"], &[]);
    assert!(out.status.success());
    let rows = data_rows(&String::from_utf8(out.stdout).unwrap());
    // rho_0_0_re is column 2, rho_1_1_re column 8
    for row in &rows {
        assert!((row[2] - rows[0][2]).abs() < 1e-12);
        assert!((row[8] - rows[0][8]).abs() < 1e-12);
    }
}

#[test]
fn simulate_oracle_column_is_tiny() {
    let out = rnet(&["simulate", "--preset", "desk", "--steps", "30", "--oracle"], &[]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(3).unwrap().ends_with(",oracle_trace_distance"));
    for row in data_rows(&text) {
        assert!(*row.last().unwrap() <= 1e-10);
    }
}

#[test]
fn compare_without_coupling_has_no_error() {
    let out = rnet(&["compare", "--preset", "decoupled", "--steps", "15"], &[]);
    assert!(out.status.success());
    for row in data_rows(&String::from_utf8(out.stdout).unwrap()) {
        assert!(row[2..].iter().all(|&e| e <= 1e-12), "{row:?}");
    }
}

#[test]
fn compare_halving_tau_halves_final_error() {
    let last = |tau: &str, steps: &str| {
        let out = rnet(&["compare", "--preset", "desk", "--tau", tau, "--steps", steps], &[]);
        assert!(out.status.success());
        *data_rows(&String::from_utf8(out.stdout).unwrap()).last().unwrap().last().unwrap()
    };
    let ratio = last("0.02", "50") / last("0.01", "100");
    assert!((1.7..=2.3).contains(&ratio), "ratio {ratio}");
}

#[test]
fn compare_over_cap_is_a_resource_error() {
    let out = rnet(&["compare", "--preset", "spin-star", "--param", "bath_spins=6"], &[]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn truncate_scan_lossless_row_is_exact() {
    let out = rnet(&["truncate-scan", "--preset", "desk", "--steps", "20", "--cutoffs", "0,1e-4"], &[]);
    assert!(out.status.success());
    let rows = data_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows[0][0], 0.0);
    assert!(rows[0][4] <= 1e-12);
}

#[test]
fn exit_codes_follow_the_scheme() {
    assert_eq!(rnet(&["bogus"], &[]).status.code(), Some(2));
    assert_eq!(rnet(&["simulate"], &[]).status.code(), Some(2));
    assert_eq!(rnet(&["simulate", "--preset", "desk", "--tau=-1"], &[]).status.code(), Some(3));
    assert_eq!(rnet(&["dsuff", "--gamma", "0"], &[]).status.code(), Some(3));
    assert_eq!(rnet(&["coarse-grain", "--preset", "desk", "--steps", "9", "--block", "2"], &[]).status.code(), Some(2));
    assert_eq!(rnet(&["--help"], &[]).status.code(), Some(0));
}

#[test]
fn enumeration_budget_env_is_honoured() {
    let args = ["branch-entropy", "--n", "1", "--steps", "6"];
    assert!(rnet(&args, &[]).status.success());
    assert_eq!(rnet(&args, &[("RN_ENUM_BUDGET", "100")]).status.code(), Some(4));
}

#[test]
fn model_files_are_accepted_and_bad_ones_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let good = tmp.path().join("m.json");
    let model = reservoir_tn::models::random_model(5, 2, 2, 1);
    reservoir_tn::models::write_model(&model, &good).unwrap();
    let out = rnet(&["simulate", "--model", good.to_str().unwrap(), "--steps", "5"], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, "{\"schema_version\": \"1\"}").unwrap();
    let out = rnet(&["simulate", "--model", bad.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn every_command_writes_csv_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();
    let runs: &[&[&str]] = &[
        &["entropy-profile", "--preset", "desk", "--steps", "20"],
        &["dsuff", "--log-base", "10"],
        &["branch-entropy", "--mode", "model", "--preset", "desk", "--steps", "3"],
        &["mi-decay", "--preset", "fast-mixing", "--tau", "0.1", "--steps", "16"],
        &["coarse-grain", "--preset", "desk", "--steps", "20", "--block", "2"],
    ];
    for args in runs {
        let mut full = args.to_vec();
        full.extend(["--out", dir]);
        let out = rnet(&full, &[]);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let summary: serde_json::Value = serde_json::from_str(&read(tmp.path(), &format!("{}.json", args[0]))).unwrap();
        assert_eq!(summary["meta"]["command"], args[0]);
        assert!(read(tmp.path(), &format!("{}.csv", args[0])).contains("# command: "));
    }
    let dsuff: serde_json::Value = serde_json::from_str(&read(tmp.path(), "dsuff.json")).unwrap();
    let d = dsuff["selected"]["d_suff"].as_f64().unwrap();
    assert!((d - 894.2).abs() < 0.1);
}
