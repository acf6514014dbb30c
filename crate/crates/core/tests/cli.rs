use std::path::Path;
use std::process::{Command, Output};

use qsig_core::cli::ExperimentConfig;

fn qsig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsig"))
        .args(args)
        .output()
        .expect("spawn qsig")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn spec_examples_parse() {
    let o = qsig(&[
        "p2", "--L", "64", "--sa", "0", "--sv", "0.1", "--trials", "1000", "--seed", "7",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = qsig(&["p2", "--sa", "0.2", "--sv", "0.1"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("s_a < s_v"));
    let o = qsig(&["hanaoka", "--q", "15"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("not a prime"));
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    assert_eq!(code(&qsig(&["p2", "--bogus"])), 1);
    assert_eq!(
        code(&qsig(&["p2", "--attack", "tamper-keys", "--trials", "10"])),
        1
    );
    assert_eq!(
        code(&qsig(&["gc-qds", "--L", "4", "--code", "hadamard:5"])),
        1
    );
    let h = qsig(&["--help"]);
    assert_eq!(code(&h), 0);
    assert!(String::from_utf8_lossy(&h.stdout).contains("sweep"));
}

#[test]
fn honest_p2_has_no_mismatches() {
    let o = qsig(&["p2", "--L", "32", "--trials", "500"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let report: serde_json::Value = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
    assert_eq!(report["mean_mismatches"], 0.0);
    assert_eq!(report["successes"], 500);
}

#[test]
fn bound_violation_exit_code() {
    let args = [
        "p2", "--L", "64", "--sv", "0.2", "--attack", "forge", "--trials", "2000",
    ];
    let o = qsig(&args);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bound violation"));
    assert!(!o.stdout.is_empty(), "reports are still written");
    let mut relaxed = args.to_vec();
    relaxed.push("--no-check-bounds");
    assert_eq!(code(&qsig(&relaxed)), 0);
}

#[test]
fn config_echo_reproduces_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = qsig(&[
        "mqds",
        "--L",
        "200",
        "--alpha",
        "0.5",
        "--attack",
        "repudiate",
        "--trials",
        "300",
        "--seed",
        "9",
    ]);
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    let text = String::from_utf8(first.stdout.clone()).unwrap();
    let header: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(header["tool"], "qsig");
    let cfg_path = dir.path().join("echo.json");
    std::fs::write(&cfg_path, header["config"].to_string()).unwrap();
    let cfg = ExperimentConfig::from_file(&cfg_path).unwrap();
    assert_eq!(cfg.spec.seed, 9);
    let again = qsig(&["attack", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(code(&again), 0, "{}", stderr(&again));
    assert_eq!(again.stdout, first.stdout);
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|x| x.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn forge_sweep_over_l() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("forge.jsonl");
    let spec = r#"{"params":{"protocol":"p2","L":16,"s_a":0,"s_v":0.05},"attack":"forge","trials":20000,"seed":1}"#;
    let o = qsig(&[
        "sweep",
        "--spec",
        spec,
        "--axis",
        "L=16,32,64",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let reports: Vec<serde_json::Value> = text
        .lines()
        .skip(1)
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(reports.len(), 3);
    for r in &reports {
        assert!(
            r["empirical"].as_f64().unwrap() <= r["bound"].as_f64().unwrap(),
            "{r}"
        );
        assert_eq!(r["bound_tag"], "p2-forging");
    }
}

#[test]
fn repudiation_sweep_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    std::fs::write(
        &cfg,
        r#"
format = "csv"
[spec]
attack = "repudiate"
trials = 2000
seed = 4
[spec.params]
protocol = "p2"
L = 16
s_a = 0
s_v = 0.1
[[sweep.axes]]
parameter = "L"
values = [16, 32, 64]
[[sweep.axes]]
parameter = "s_v"
values = [0.1, 0.2]
"#,
    )
    .unwrap();
    let out = dir.path().join("plot.csv");
    let o = qsig(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (header, rows) = read_csv(&out);
    assert_eq!(&header[..2], ["L", "s_v"]);
    for col in ["empirical", "oracle", "bound", "bound_tag"] {
        assert!(header.iter().any(|h| h == col), "missing {col}");
    }
    assert_eq!(rows.len(), 6);
    let bound = header.iter().position(|h| h == "bound").unwrap();
    for s_v in ["0.1", "0.2"] {
        let b: Vec<f64> = rows
            .iter()
            .filter(|r| r[1] == s_v)
            .map(|r| r[bound].parse().unwrap())
            .collect();
        assert!(
            b.windows(2).all(|w| w[1] < w[0]),
            "bound not decreasing in L: {b:?}"
        );
    }
}

#[test]
fn sweep_validation_happens_before_running() {
    let spec =
        r#"{"params":{"protocol":"p2","L":16,"s_a":0,"s_v":0.05},"attack":"forge","trials":10}"#;
    assert_eq!(
        code(&qsig(&["sweep", "--spec", spec, "--axis", "L=16,17"])),
        1
    );
    assert_eq!(code(&qsig(&["sweep", "--spec", spec, "--axis", "L="])), 1);
    assert_eq!(
        code(&qsig(&[
            "sweep",
            "--spec",
            spec,
            "--axis",
            "L=16,32",
            "--max-runs",
            "1"
        ])),
        1
    );
    assert_eq!(
        code(&qsig(&["sweep", "--spec", spec, "--axis", "alpha=1"])),
        1
    );
    assert_eq!(code(&qsig(&["attack", "--config", "/nonexistent.json"])), 1);
}
