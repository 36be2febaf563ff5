use std::process::{Command, Output};

use qfa_core::machines::{compile, parse_spec};
use serde_json::Value;

fn qfa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfa")).args(args).output().expect("spawn qfa")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json stdout")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn construct_emits_parseable_specs() {
    let out = qfa(&["construct", "AW_PAL"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("4/5"));
    parse_spec(&text).unwrap();

    let out = qfa(&["construct", "EVENODD_MCQFA", "--k", "3"]);
    let spec = parse_spec(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    compile(&spec).unwrap();
}

#[test]
fn construct_usage_errors() {
    assert_eq!(code(&qfa(&["construct", "EVENODD_DFA", "--k", "25"])), 2);
    assert_eq!(code(&qfa(&["construct", "NO_SUCH_MACHINE"])), 2);
    assert_eq!(code(&qfa(&["construct", "EVENODD_MCQFA"])), 2);
}

#[test]
fn construct_to_file_then_analyze_it() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let p = path.to_str().unwrap();
    assert!(qfa(&["construct", "EVENODD_DFA", "--k", "2", "--out", p]).status.success());
    let doc = json(&qfa(&["analyze", p, "--input", "a24"]));
    assert_eq!(doc["result"]["p_accept"], "1/1");
    assert_eq!(doc["status"], Value::Null);
}

#[test]
fn restarting_twinpal_accepts_surely() {
    let doc = json(&qfa(&["analyze", "EXACT_TWINPAL", "--problem", "PromiseTWINPAL", "--u", "aa", "--v", "ab", "--mode", "restart"]));
    assert_eq!(doc["status"], "Yes");
    assert_eq!(doc["result"]["overall_accept"], "1/1");
}

#[test]
fn evenodd_unary_and_promise() {
    let doc = json(&qfa(&["analyze", "EVENODD_MCQFA", "--k", "2", "--input", "a8", "--mode", "exact"]));
    assert_eq!(doc["result"]["p_accept"], "1/1");
    let doc = json(&qfa(&["analyze", "EVENODD_MCQFA", "--k", "2", "--input", "a12"]));
    assert_eq!(doc["result"]["p_reject"], "1/1");

    let out = qfa(&["analyze", "EVENODD_MCQFA", "--k", "2", "--input", "a7"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside the promise"));
    let doc = json(&qfa(&["analyze", "EVENODD_MCQFA", "--k", "2", "--input", "a7", "--allow-unpromised"]));
    assert_eq!(doc["status"], "OutsidePromise");
    assert_eq!(doc["certified"], true);

    // Huge unary inputs stay symbolic; the first is 8 * (10^20 + 1).
    let doc = json(&qfa(&["analyze", "EVENODD_MCQFA", "--k", "3", "--input", "a800000000000000000008"]));
    assert_eq!(doc["result"]["p_reject"], "1/1");
    let doc = json(&qfa(&["analyze", "EVENODD_MCQFA", "--k", "3", "--input", "a800000000000000000000"]));
    assert_eq!(doc["result"]["p_accept"], "1/1");
}

#[test]
fn wrong_mode_is_usage_error() {
    assert_eq!(code(&qfa(&["analyze", "EXACT_PAL_SWEEPING", "--input", "aacab", "--mode", "exact"])), 2);
    assert_eq!(code(&qfa(&["analyze", "AW_PAL", "--input", "abc", "--mode", "restart"])), 2);
}

#[test]
fn missing_seed_is_usage_error() {
    assert_eq!(code(&qfa(&["analyze", "AW_PAL", "--input", "abc", "--mode", "mc"])), 2);
    assert_eq!(code(&qfa(&["generate", "--problem", "PromisePAL", "--size", "4"])), 2);
    assert_eq!(code(&qfa(&["game", "magic-square", "--rounds", "3"])), 2);
    assert_eq!(code(&qfa(&["game", "memory", "--bob", "quantum"])), 2);
}

#[test]
fn monte_carlo_is_deterministic_across_workers() {
    let base = ["analyze", "AW_PAL", "--input", "abcab", "--mode", "mc", "--trials", "3000", "--seed", "9"];
    let one = qfa(&[&base[..], &["--workers", "1"]].concat());
    let four = qfa(&[&base[..], &["--workers", "4"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(json(&one)["result"]["trials"], 3000);
}

#[test]
fn generate_json_lines_and_csv() {
    let args = ["generate", "--problem", "PromiseTWINPAL", "--size", "3", "--count", "4", "--seed", "11", "--status", "no"];
    let out = qfa(&args);
    assert_eq!(out.stdout, qfa(&args).stdout);
    let lines: Vec<Value> = String::from_utf8(out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().all(|l| l["status"] == "No"));

    let csv = qfa(&[&args[..], &["--format", "csv"]].concat());
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("problem,string,status"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn verify_contextuality_passes() {
    let out = qfa(&["verify", "contextuality"]);
    let doc = json(&out);
    assert_eq!(doc["passed"], true);
    assert!(String::from_utf8_lossy(&out.stderr).contains("[PASS] criterion 8"));
    assert_eq!(code(&qfa(&["verify", "nonsense"])), 2);
}

#[test]
fn magic_square_games() {
    let doc = json(&qfa(&["game", "magic-square", "--strategy", "quantum", "--rounds", "200", "--seed", "1"]));
    assert_eq!(doc["value"], "1/1");
    let doc = json(&qfa(&["game", "magic-square", "--strategy", "classical", "--alice", "+++/+++/+++", "--bob", "+++/+++/++-", "--rounds", "50", "--seed", "1"]));
    assert_eq!(doc["rounds"].as_array().unwrap().len(), 50);
    // Alice rows must have product +1.
    assert_eq!(code(&qfa(&["game", "magic-square", "--strategy", "classical", "--alice", "-++/+++/+++", "--rounds", "5", "--seed", "1"])), 2);
}

#[test]
fn memory_game_table() {
    let out = qfa(&["game", "memory", "--bob", "classical", "--Q", "8", "--N", "2^33", "--seed", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("problem,model,memory,value,exact,decimal"));
    assert_eq!(text.lines().count(), 7);
    let doc = json(&qfa(&["game", "memory", "--bob", "classical", "--q", "8", "--n", "2^33", "--seed", "3"]));
    assert_eq!(doc["report"]["expected_v"], "8/1");
    let doc = json(&qfa(&["game", "memory", "--bob", "quantum", "--q", "5", "--seed", "3"]));
    assert_eq!(doc["report"]["v"], "5/1");
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "mode = \"mc\"\ntrials = 500\nseed = 21\nworkers = 2\n").unwrap();
    let c = cfg.to_str().unwrap();
    let via_config = qfa(&["analyze", "AW_PAL", "--input", "abcab", "--config", c]);
    let explicit = qfa(&["analyze", "AW_PAL", "--input", "abcab", "--mode", "mc", "--trials", "500", "--seed", "21"]);
    assert_eq!(json(&via_config), json(&explicit));
    // Command-line flags win over the file.
    let doc = json(&qfa(&["analyze", "AW_PAL", "--input", "abcab", "--config", c, "--trials", "100"]));
    assert_eq!(doc["result"]["trials"], 100);
}
