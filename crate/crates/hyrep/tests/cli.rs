use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hyrep(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyrep")).args(args).current_dir(dir).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn rate_sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        let o = hyrep(&["rate", "--figure", "6b", "--distances", "300:900:100", "--out", name], dir.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (a, b) = (fs::read(dir.path().join("a.csv")).unwrap(), fs::read(dir.path().join("b.csv")).unwrap());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# hyrep-csv v1 rate\n"));
    assert_eq!(text.lines().count(), 2 + 7);

    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("a.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "rate");
}

#[test]
fn preset_round_trips_through_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = hyrep(&["presets", "--figure", "6a"], dir.path());
    assert_eq!(code(&o), 0);
    fs::write(dir.path().join("fig6a.toml"), &o.stdout).unwrap();
    let from_file = hyrep(&["rate", "--config", "fig6a.toml", "--out", "f.csv"], dir.path());
    let from_flag = hyrep(&["rate", "--figure", "6a", "--distances", "18", "--out", "g.csv"], dir.path());
    assert_eq!(code(&from_file), 0, "{}", String::from_utf8_lossy(&from_file.stderr));
    assert_eq!(code(&from_flag), 0, "{}", String::from_utf8_lossy(&from_flag.stderr));
    let row = |f: &str| {
        let t = fs::read_to_string(dir.path().join(f)).unwrap();
        let line = t.lines().nth(2).unwrap().to_string();
        // drop the series label
        line.split_once(',').unwrap().1.to_string()
    };
    assert_eq!(row("f.csv"), row("g.csv"));
}

#[test]
fn usage_and_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&hyrep(&["rate", "--n-links", "0"], dir.path())), 2);
    assert_eq!(code(&hyrep(&["frobnicate"], dir.path())), 2);
    fs::write(dir.path().join("bad.toml"), "n_links = 3\nwarp_factor = 9\n").unwrap();
    assert_eq!(code(&hyrep(&["rate", "--config", "bad.toml"], dir.path())), 2);
    assert_eq!(code(&hyrep(&["rate", "--config", "missing.toml"], dir.path())), 2);
    // end-point purification would need ~1e76 chains per pair
    let hopeless = ["mc", "--n-links", "10", "--l0-km", "1", "--rounds", "1", "--trials", "10"];
    assert_eq!(code(&hyrep(&hopeless, dir.path())), 2);
}

#[test]
fn failing_oracle_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = hyrep(&["oracle", "--check", "jcm", "--out", "jcm.json"], dir.path());
    assert_eq!(code(&o), 1);
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("jcm.json")).unwrap()).unwrap();
    assert!(report.to_string().contains("fidelity_ground"));
    assert_eq!(code(&hyrep(&["oracle", "--check", "purify,tcm"], dir.path())), 0);
}

#[test]
fn monte_carlo_ignores_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["mc", "--n-links", "4", "--l0-km", "0.3", "--rounds", "1", "--trials", "3000", "--seed", "5"];
    for (w, name) in [("1", "one.json"), ("4", "four.json")] {
        let mut args = base.to_vec();
        args.extend(["--workers", w, "--out", name]);
        let o = hyrep(&args, dir.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let load = |f: &str| -> serde_json::Value { serde_json::from_slice(&fs::read(dir.path().join(f)).unwrap()).unwrap() };
    let (a, b) = (load("one.json"), load("four.json"));
    assert_eq!(a["summary"], b["summary"]);
    assert_ne!(a["workers"], b["workers"]);
}
