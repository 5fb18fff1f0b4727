use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dota-learn")).args(args).output().unwrap()
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dota-learn-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn learn_then_check_equivalence() {
    let dir = scratch("learn");
    let out = dir.join("learned.json");
    let stats = dir.join("stats.json");
    let trace = dir.join("trace.jsonl");
    let o = bin(&[
        "learn",
        "--target",
        &data("delay_window.json"),
        "--scripted-ctx",
        &data("delay_window_counterexamples.txt"),
        "--out",
        out.to_str().unwrap(),
        "--stats",
        stats.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(s["equivalence"], 5);
    assert_eq!(s["final_N"], 3);
    let lines = std::fs::read_to_string(&trace).unwrap();
    assert!(lines.lines().any(|l| l.contains("\"suffix-added\"") && l.contains("(a,0)(a,5.5)")));

    let o = bin(&["check-equiv", &data("delay_window.json"), out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), r#"{"equivalent":true}"#);
}

#[test]
fn inequivalent_models_print_a_counterexample() {
    let dir = scratch("gen");
    let o = bin(&["gen", "--locations", "3", "--alphabet", "1", "--kappa", "4", "--count", "2", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success());
    let files: Vec<String> = String::from_utf8_lossy(&o.stdout).lines().map(str::to_string).collect();
    assert_eq!(files.len(), 2);
    let o = bin(&["check-equiv", &data("delay_window.json"), &files[0]]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["equivalent"], false);
    assert_ne!(v["a"], v["b"]);
}

#[test]
fn mismatched_models_are_input_errors() {
    let o = bin(&["check-equiv", &data("delay_window.json"), &data("alternating_bit.json")]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["learn", "--target", &data("delay_window.json"), "--mode", "dtmm"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["learn", "--target", &data("delay_window.json"), "--solver", "z9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_prints_a_csv_row() {
    let o = bin(&["bench", "--group", "3_2_5", "--count", "2", "--threads", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout).to_string();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("group,transitions_mean,mq_min"));
    assert!(lines[1].starts_with("3_2_5,"));
    assert_eq!(lines[1].split(',').nth(9), Some("2"));
}
