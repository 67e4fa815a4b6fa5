use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use multiprog::metrics::SuiteReport;
use multiprog::qaoa::QaoaReport;

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multiprog"))
        .args(args)
        .current_dir(repo())
        .env_remove("MULTIPROG_OUT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(dir: &Path, file: &str) -> String {
    std::fs::read_to_string(dir.join(file)).unwrap()
}

#[test]
fn stats_on_bv3() {
    let o = run(&["stats", "benchmarks/bv3.qasm"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    assert!(line.contains("qubits=3"), "{line}");
    assert!(line.contains("cx=2"), "{line}");
    let by_name = run(&["stats", "bv3"]);
    assert_eq!(stdout(&by_name), line);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["stats"]).status.code(), Some(2));
    assert_eq!(run(&["stats", "no_such_circuit"]).status.code(), Some(1));
}

#[test]
fn unknown_device_names_the_field() {
    let o = run(&["suite", "--device", "nonexistent", "--seeds", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`device`"), "{}", stderr(&o));
}

#[test]
fn seeds_are_mandatory() {
    let o = run(&["suite", "--device", "h1_2_like"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`seeds`"));
    let o = run(&["qaoa", "--device", "h1_2_like"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`qaoa.seed`"));
}

#[test]
fn invalid_configs_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("device = 'h1_2_like'\nseeds = [1]\nshots = 0\n", "shots"),
        ("device = 'h1_2_like'\nseeds = []\n", "seeds"),
        ("device = 'h1_2_like'\nseeds = [1]\nshot = 5\n", "shot"),
        ("device = 'h1_2_like'\nseeds = [1]\n[noise]\np2q = 2.0\n", "noise.p2q"),
        ("device = 'missing.toml'\nseeds = [1]\n", "device"),
    ];
    for (i, (text, field)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("c{i}.toml"));
        std::fs::write(&path, text).unwrap();
        let o = run(&["suite", "--config", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "{text}");
        assert!(stderr(&o).contains(field), "{text}: {}", stderr(&o));
    }
}

#[test]
fn suite_reports_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |dir: &Path| {
        vec![
            "suite".to_string(),
            "--device".into(),
            "h1_2_like".into(),
            "--shots".into(),
            "10".into(),
            "--seeds".into(),
            "1..20".into(),
            "--pairing".into(),
            "1-2,3-4,5-6,7-8".into(),
            "--out".into(),
            dir.to_str().unwrap().into(),
        ]
    };
    for dir in [a.path(), b.path()] {
        let argv = args(dir);
        let o = run(&argv.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for file in ["suite_report.json", "suite_results.csv"] {
        assert_eq!(read(a.path(), file), read(b.path(), file), "{file}");
    }

    let csv = read(a.path(), "suite_results.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("pair,id,name,mode,seed,shots,pst"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4 * 2 * 2 * 20);
    for row in rows {
        let pst: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&pst));
    }

    let json = read(a.path(), "suite_report.json");
    let report = SuiteReport::from_json(&json).unwrap();
    assert_eq!(report.to_json(), json);
    assert_eq!(report.config.seeds, (1..=20).collect::<Vec<u64>>());
}

#[test]
fn config_paths_resolve_against_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(repo().join("configs/devices/trap6.toml"), dir.path().join("trap6.toml")).unwrap();
    std::fs::write(
        dir.path().join("campaign.toml"),
        "device = 'trap6.toml'\nshots = 20\nseeds = '1..2'\npairing = [[1, 3]]\nout = 'out'\n[cost]\nfixed_per_submission = 0.0\n",
    )
    .unwrap();
    let o = run(&["suite", "--config", dir.path().join("campaign.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = SuiteReport::from_json(&read(&dir.path().join("out"), "suite_report.json")).unwrap();
    assert_eq!(report.config.device.name, "trap6");
    assert_eq!(report.config.device.cost.fixed_per_submission, 0.0);
    assert_eq!(report.config.shots, 20);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_multiprog"))
        .args([
            "suite",
            "--device",
            "h1_2_like",
            "--shots",
            "5",
            "--seeds",
            "1",
            "--pairing",
            "1-2",
        ])
        .env("MULTIPROG_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("suite_report.json").is_file());
}

#[test]
fn qaoa_campaign_from_config() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let o = run(&[
            "qaoa",
            "--config",
            "configs/qaoa_h1_2_like.toml",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for file in ["qaoa_report.json", "qaoa_results.csv"] {
        assert_eq!(read(a.path(), file), read(b.path(), file), "{file}");
    }
    let report = QaoaReport::from_json(&read(a.path(), "qaoa_report.json")).unwrap();
    assert_eq!(report.copies.len(), 2);
    assert_eq!(report.max_cut, 4.0);
    let csv = read(a.path(), "qaoa_results.csv");
    assert!(csv.starts_with("run,outcome,count,shots,cut,optimal\n"));
    assert!(!csv.contains("-0,"));
}

#[test]
fn rebase_round_trips_through_qasm() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("alu.qasm");
    let o = run(&[
        "rebase",
        "alu-v0_27",
        "--basis",
        "trapped-ion",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let stats = stdout(&run(&["stats", out.to_str().unwrap(), "--basis", "trapped-ion"]));
    let direct = stdout(&run(&["stats", "alu-v0_27", "--basis", "trapped-ion"]));
    assert_eq!(stats.split_once(' ').unwrap().1, direct.split_once(' ').unwrap().1);
    assert_eq!(run(&["rebase", "bv3", "--basis", "ion"]).status.code(), Some(2));
}

#[test]
fn allocate_and_cost() {
    let o = run(&["allocate", "--device", "ibmq_mumbai_like", "bv3", "bv4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let alloc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(alloc["programs"].as_array().unwrap().len(), 2);

    let o = run(&["allocate", "--device", "configs/devices/line5.toml", "bv3", "bv4"]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["cost", "--device", "h1_2_like", "--shots", "100", "bv3", "bv4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let value = |key: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(key))
            .unwrap()
            .trim()
            .parse()
            .unwrap()
    };
    assert!(value("merged ") < value("bv3 ") + value("bv4 "));
}

#[test]
fn simulate_noiseless_is_deterministic() {
    let o = run(&["simulate", "bv3", "--seed", "4", "--shots", "500"]);
    assert_eq!(o.status.code(), Some(0));
    let hist: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(hist["counts"]["11"], 500);
    let o = run(&["simulate", "bv3", "--device", "h1_2_like", "--seed", "4", "--noiseless"]);
    let hist: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(hist["counts"]["11"], 100);
}

#[test]
fn shipped_device_files_load() {
    for file in ["configs/devices/line5.toml", "configs/devices/trap6.toml"] {
        let o = run(&["simulate", "bv3", "--device", file, "--seed", "1", "--shots", "50"]);
        assert_eq!(o.status.code(), Some(0), "{file}: {}", stderr(&o));
    }
}
