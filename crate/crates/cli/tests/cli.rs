use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use num_bigint::BigInt;
use serde_json::Value;

use rc_core::congruence::{claim_by_id, Expr};
use rc_core::sequences::{Recurrence, SequenceDef, SequenceSource};

fn rc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rc"))
        .args(args)
        .env_remove("RC_JOBS")
        .output()
        .expect("rc runs")
}

fn rc_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_rc"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("rc runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

const W_SQUARE: &[&str] = &["telescope", "--seq", "W", "--p", "8k+9", "--window=-2..0", "--deg", "2"];

#[test]
fn telescope_then_certify_from_file_and_stdin() {
    let path = tmp("w.json");
    let mut args = W_SQUARE.to_vec();
    args.extend(["--out", path.to_str().unwrap()]);
    let t = rc(&args);
    assert_eq!(t.status.code(), Some(0));
    assert!(t.stdout.is_empty(), "--out keeps stdout empty");

    let c = rc(&["certify", path.to_str().unwrap(), "--upto", "30", "--hl", "n"]);
    assert_eq!(c.status.code(), Some(0));
    let v = json(&c);
    assert_eq!(v["pass"], true);
    assert_eq!(v["hl_mode"], true);
    assert_eq!(v["checked_upto"], 30);

    let text = std::fs::read_to_string(&path).unwrap();
    let c = rc_stdin(&["certify", "-", "--reduce-mod", "2n"], &text);
    assert_eq!(c.status.code(), Some(0));
    assert!(json(&c)["reduced"].is_array());
}

#[test]
fn corrupted_certificate_fails_certify() {
    let mut cert = json(&rc(W_SQUARE));
    cert["p"] = serde_json::json!(["10", "8"]);
    let c = rc_stdin(&["certify", "-"], &cert.to_string());
    assert_eq!(c.status.code(), Some(1));
    assert_eq!(json(&c)["pass"], false);
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    assert_eq!(rc(W_SQUARE).stdout, rc(W_SQUARE).stdout);
    let verify = |jobs: &str| {
        rc(&["--jobs", jobs, "verify", "--claim", "t-weighted-mod-p3", "--claim", "w-square-mod-2n"]).stdout
    };
    let one = verify("1");
    assert!(!one.is_empty());
    assert_eq!(one, verify("3"));
}

#[test]
fn not_found_exits_one() {
    let o = rc(&["telescope", "--seq", "W", "--p", "8k+10", "--window=-2..0", "--deg", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["found"], false);
    assert_eq!(v["deg_bound"], 2);
}

#[test]
fn malformed_input_exits_two() {
    for args in [
        vec!["telescope", "--seq", "W", "--p", "8k+", "--window=-2..0"],
        vec!["telescope", "--seq", "Nope", "--p", "1"],
        vec!["telescope", "--seq", "W", "--p", "1", "--window=0..1"],
        vec!["verify", "--claim", "no-such-claim"],
        vec!["verify", "--range", "10"],
        vec!["eval", "--seq", "Nope", "--range", "0..3"],
        vec!["frobnicate"],
    ] {
        let o = rc(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn false_claim_reports_failing_points() {
    let mut c = claim_by_id("w-square-mod-2n").unwrap();
    c.id = "off-by-one".into();
    c.rhs = c.rhs + Expr::int(1);
    let path = tmp("claims.json");
    std::fs::write(&path, serde_json::to_string(&vec![c]).unwrap()).unwrap();
    let o = rc(&["verify", "--claims-file", path.to_str().unwrap(), "--range", "3..8"]);
    assert_eq!(o.status.code(), Some(1));
    let rep = &json(&o)[0];
    assert_eq!(rep["pass"], false);
    let points: Vec<i64> = rep["failures"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["point"].as_i64().unwrap())
        .collect();
    assert_eq!(points, (3..=8).collect::<Vec<_>>());
}

#[test]
fn primes_flag_restricts_an_integer_domain() {
    let o = rc(&["verify", "--claim", "trinomial-difference", "--primes", "2..50", "--exclude", "2"]);
    assert_eq!(o.status.code(), Some(0));
    // 3, 5, 7, ..., 47
    assert_eq!(json(&o)[0]["checked"], 14);
}

#[test]
fn eval_lists_terms_and_claim_values() {
    let v = json(&rc(&["eval", "--seq", "T", "--range", "0..5"]));
    let terms: Vec<&str> = v.as_array().unwrap().iter().map(|t| t["value"].as_str().unwrap()).collect();
    assert_eq!(terms, ["1", "1", "3", "7", "19", "51"]);

    let v = json(&rc(&["eval", "--claim", "t-weighted-mod-p3", "--range", "2..2"]));
    assert_eq!(v[0]["in_domain"], false);
    assert_eq!(v[0]["holds"], false);
}

#[test]
fn timings_only_on_request() {
    let plain = json(&rc(&["verify", "--claim", "t-odd", "--range", "0..10"]));
    assert!(plain[0].get("elapsed_ms").is_none());
    let timed = json(&rc(&["verify", "--claim", "t-odd", "--range", "0..10", "--timings"]));
    assert!(timed[0].get("elapsed_ms").is_some());
}

#[test]
fn user_sequence_against_the_constant_sequence() {
    // Fibonacci: sum_{k<n} F_k = F_{n+1} - 1
    let rec = Recurrence::from_ints(&[&[-1], &[-1], &[1]]).unwrap();
    let initial: BTreeMap<i64, BigInt> = [(-1, 1), (0, 0), (1, 1)]
        .into_iter()
        .map(|(i, v)| (i, BigInt::from(v)))
        .collect();
    let fib = SequenceDef::new("F", rec, initial, None).unwrap();
    let path = tmp("fib.json");
    std::fs::write(&path, serde_json::to_string(&vec![SequenceSource::Recursive(fib)]).unwrap()).unwrap();
    let seqs = path.to_str().unwrap();

    let o = rc(&["--sequences", seqs, "telescope", "--seq", "F", "--seq-b", "1", "--p", "1", "--deg", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let cert = String::from_utf8(o.stdout).unwrap();
    let c = rc_stdin(&["--sequences", seqs, "certify", "-", "--upto", "40"], &cert);
    assert_eq!(c.status.code(), Some(0));
    let spots: Vec<String> = json(&c)["spot_values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().map(String::from).unwrap_or_else(|| v.to_string()))
        .collect();
    // F_2 - 1, F_3 - 1, ...
    assert_eq!(&spots[..6], ["0", "1", "2", "4", "7", "12"]);
}
