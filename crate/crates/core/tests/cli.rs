use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_irs-stealth"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("irs-stealth-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn min_elements_prints_threshold() {
    let out = bin()
        .args(["min-elements", "--zeta-bar", "0.8", "--n2", "200", "--beta-max", "1", "--realizations", "20"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "12");
}

#[test]
fn min_elements_rejects_bad_efficiency() {
    let out = bin().args(["min-elements", "--zeta-bar", "1.5"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn run_is_byte_deterministic() {
    let paths = [scratch("a.csv"), scratch("b.csv")];
    for p in &paths {
        let out = bin()
            .arg("run")
            .arg("power-vs-elements")
            .arg("--config")
            .arg(config("single_radar.toml"))
            .args(["--trials", "3", "--seed", "9", "--out"])
            .arg(p)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("sweep,solver,trial,seed,power_watts,power_db\n"));
    // 10 sweep values × 5 solvers × 3 trials.
    assert_eq!(text.lines().count(), 1 + 10 * 5 * 3);
}

#[test]
fn unknown_preset_fails() {
    let out = bin()
        .args(["run", "fig-99", "--trials", "1", "--out"])
        .arg(scratch("x.csv"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown preset"));
}

#[test]
fn bad_config_names_field() {
    let path = scratch("bad.toml");
    std::fs::write(&path, "[target]\nbeta_max = -1.0\n").unwrap();
    let out = bin()
        .arg("solve")
        .arg("--config")
        .arg(&path)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("target.beta_max"));
}

#[test]
fn missing_config_is_an_error() {
    let out = bin()
        .args(["solve", "--config", "/nonexistent/config.toml"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn solve_prints_theta_and_power() {
    let out = bin()
        .arg("solve")
        .arg("--config")
        .arg(config("single_radar.toml"))
        .args(["--solver", "reverse-alignment"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    let field = |key: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(key)).unwrap();
        line.split_whitespace().nth(1).unwrap().parse().unwrap()
    };
    assert!(field("sum_power_watts ") < field("no_irs_power_watts "));
    let theta_rows = text.lines().skip_while(|l| *l != "theta").skip(1).count();
    assert_eq!(theta_rows, 8);
}

#[test]
fn reverse_alignment_needs_single_radar() {
    let out = bin()
        .arg("solve")
        .arg("--config")
        .arg(config("three_radars.toml"))
        .args(["--solver", "reverse-alignment"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
