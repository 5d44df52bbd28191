use std::fs;
use std::process::Command;

const CONFIG: &str = r#"
seeds = [0, 1]
checkpoint_every = 4

[env]
K = 6
M = 2
N = 10
tau = 120

[[algorithms]]
kind = "bog"

[[algorithms]]
kind = "moss"
"#;

fn bss() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bss"))
}

#[test]
fn run_writes_traces_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, CONFIG).unwrap();
    let out = dir.path().join("out");
    let status = bss()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(["--threads", "2"])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("traces.csv")).unwrap();
    // 2 algorithms x 2 seeds x ceil(10/4)
    assert_eq!(csv.lines().count(), 1 + 12);
    assert!(csv.starts_with("algo,seed,task,cum_regret\n"));
    assert!(fs::read_to_string(out.join("traces.json")).unwrap().contains("\"artifact\""));
}

#[test]
fn sweep_writes_long_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, CONFIG).unwrap();
    let status = bss()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .args(["--param", "tau", "--values", "60,90,120", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 2 * 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("tau,60,BOG,0,"));
}

#[test]
fn dp_prints_table() {
    let out = bss()
        .args(["dp", "--N", "3", "--M", "2", "--cinfo", "31.62", "--chit", "10", "--cmiss", "100"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,s,V,G,p,q");
    assert_eq!(lines.len(), 1 + 4 * 3);
    // one round left: V = C_info, p = 1
    let row: Vec<f64> = lines[7].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!((row[0], row[1]), (2.0, 0.0));
    assert!((row[2] - 31.62).abs() < 1e-12);
    assert_eq!(row[4], 1.0);
}

#[test]
fn dp_rejects_bad_cost_order() {
    let out = bss()
        .args(["dp", "--N", "3", "--M", "2", "--cinfo", "200", "--chit", "10", "--cmiss", "100"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("cost order"));
}

#[test]
fn unknown_config_key_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, CONFIG.replace("checkpoint_every", "checkpoint_evry")).unwrap();
    let out = bss().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn quick_verify_passes() {
    let out = bss().args(["verify", "--quick"]).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(!text.contains("FAIL"));
}
