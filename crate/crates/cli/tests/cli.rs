use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use fuglede_cli::documents::{canonical_json, SetDocument};
use serde_json::Value;

fn fuglede(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fuglede"))
        .args(args)
        .env_remove("FUGLEDE_MAX_NODES")
        .env_remove("FUGLEDE_THREADS")
        .output()
        .unwrap()
}

fn fuglede_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_fuglede"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn rank_four_construction_through_a_pipe() {
    let brock = fuglede(&["brock", "--p", "3", "--rank4"]);
    assert_eq!(code(&brock), 0);
    let rank = fuglede_stdin(&["hadamard", "rank"], &brock.stdout);
    assert_eq!(code(&rank), 0);
    assert_eq!(String::from_utf8_lossy(&rank.stdout).trim(), "4");
    let check = fuglede_stdin(&["hadamard", "check"], &brock.stdout);
    assert_eq!(code(&check), 0);
    assert_eq!(json(&check)["is_log_hadamard"], true);
}

#[test]
fn rank_four_needs_three_mod_four() {
    let out = fuglede(&["brock", "--p", "5", "--rank4"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("3 mod 4"));
    let out = fuglede(&["brock", "--p", "5", "--n", "4"]);
    assert_eq!(code(&out), 2);
    let out = fuglede(&["brock", "--p", "5", "--n", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["rank"], 5);
}

#[test]
fn tiling_pairs_in_z2_squared() {
    let dir = tempfile::tempdir().unwrap();
    let e = write(dir.path(), "e.json", r#"{"moduli":[2,2],"points":[[0,0],[0,1]]}"#);
    let a = write(dir.path(), "a.json", r#"{"moduli":[2,2],"points":[[0,0],[1,0]]}"#);
    let b = write(dir.path(), "b.json", r#"{"moduli":[2,2],"points":[[0,0],[0,1]]}"#);
    let ok = fuglede(&["check-tiling", "--set", &e, "--partner", &a]);
    assert_eq!(code(&ok), 0);
    let v = json(&ok);
    assert_eq!(v["verdict"]["is_tiling"], true);
    assert_eq!(v["conditions"]["fourier_product_zero"], true);
    let bad = fuglede(&["check-tiling", "--set", &e, "--partner", &b]);
    assert_eq!(code(&bad), 1);
    assert_eq!(json(&bad)["verdict"]["witness"], serde_json::json!([0, 0]));
    let search = fuglede(&["check-tiling", "--set", &e]);
    assert_eq!(code(&search), 0);
    assert_eq!(json(&search)["outcome"], "found");
}

#[test]
fn spectral_checks_and_search() {
    let dir = tempfile::tempdir().unwrap();
    let e = write(dir.path(), "e.json", r#"{"moduli":[3,3],"points":[[0,0],[1,0],[2,0]]}"#);
    let good = write(dir.path(), "b.json", r#"{"moduli":[3,3],"points":[[0,0],[1,0],[2,0]]}"#);
    let bad = write(dir.path(), "c.json", r#"{"moduli":[3,3],"points":[[0,0],[0,1],[0,2]]}"#);
    assert_eq!(code(&fuglede(&["check-spectral", "--set", &e, "--spectrum", &good])), 0);
    let out = fuglede(&["check-spectral", "--set", &e, "--spectrum", &bad]);
    assert_eq!(code(&out), 1);
    assert!(json(&out)["violating_pair"].is_array());
    let search = fuglede(&["check-spectral", "--set", &e]);
    assert_eq!(code(&search), 0);
    let odd = write(dir.path(), "o.json", r#"{"moduli":[3,3],"points":[[0,0],[1,0]]}"#);
    let none = fuglede(&["check-spectral", "--set", &odd]);
    assert_eq!(code(&none), 1);
    assert_eq!(json(&none)["outcome"], "proven_none");
}

#[test]
fn malformed_documents_report_their_position() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"moduli":[3,3],"points":[[0,0],[1,3]]}"#, "/points/1/1"),
        (r#"{"moduli":[3,3],"points":[[0,0],[1,2],[0,0]]}"#, "/points/2"),
        (r#"{"moduli":[3,3],"points":[[0,0],[1]]}"#, "/points/1"),
        (r#"{"moduli":[3,3],"points":[[0,0],["a",1]]}"#, "/points/1/0"),
        (r#"{"moduli":[3,3],"points":[[0,0]],"extra":1}"#, "extra"),
    ];
    for (i, (text, needle)) in cases.iter().enumerate() {
        let path = write(dir.path(), &format!("bad{i}.json"), text);
        let out = fuglede(&["check-spectral", "--set", &path]);
        assert_eq!(code(&out), 2, "{text}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle) && err.contains(&path), "{text}: {err}");
    }
    let out = fuglede_stdin(&["hadamard", "rank"], br#"{"p":3,"rows":[[0,1],[2]]}"#);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("/rows/1"));
}

#[test]
fn counterexample_documents_round_trip() {
    let out = fuglede(&["counterexample", "--p", "3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(canonical_json(&v), String::from_utf8_lossy(&out.stdout));
    for key in ["set", "spectrum"] {
        let doc: SetDocument = serde_json::from_value(v["explicit"][key].clone()).unwrap();
        let set = doc.to_set("explicit").unwrap();
        assert_eq!(set.len(), 6);
        assert_eq!(SetDocument::from_set(&set, doc.label.clone()), doc);
    }
    let dir = tempfile::tempdir().unwrap();
    let e = write(dir.path(), "e.json", &canonical_json(&v["explicit"]["set"]));
    let b = write(dir.path(), "b.json", &canonical_json(&v["explicit"]["spectrum"]));
    assert_eq!(code(&fuglede(&["check-spectral", "--set", &e, "--spectrum", &b])), 0);
    let tiles = fuglede(&["check-tiling", "--set", &e]);
    assert_eq!(code(&tiles), 1);
    assert_eq!(json(&tiles)["outcome"], "proven_none");
    assert!(v["dim4"].is_object());
    let five = json(&fuglede(&["counterexample", "--p", "5"]));
    assert!(five["dim4"].is_null() && five["explicit"].is_null());
}

#[test]
fn factor_gives_a_spectral_pair() {
    let brock = fuglede(&["brock", "--p", "7", "--rank4"]);
    let factor = fuglede_stdin(&["hadamard", "factor"], &brock.stdout);
    assert_eq!(code(&factor), 0);
    let v = json(&factor);
    assert_eq!(v["set"]["moduli"], serde_json::json!([7, 7, 7, 7]));
    let dir = tempfile::tempdir().unwrap();
    let e = write(dir.path(), "e.json", &canonical_json(&v["set"]));
    let b = write(dir.path(), "b.json", &canonical_json(&v["spectrum"]));
    assert_eq!(code(&fuglede(&["check-spectral", "--set", &e, "--spectrum", &b])), 0);
    let sd = fuglede_stdin(&["hadamard", "special-dephase"], &brock.stdout);
    assert_eq!(code(&sd), 0);
    assert_eq!(json(&sd)["rank"], 4);
    let rank = fuglede_stdin(&["hadamard", "rank"], &sd.stdout);
    assert_eq!(String::from_utf8_lossy(&rank.stdout).trim(), "4");
}

#[test]
fn dimension_three() {
    let out = fuglede(&["fuglede", "dim3", "--p", "3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["verdict"], "proven");
    assert_eq!(
        v["details"]["matrix"]["rows"],
        serde_json::json!([
            [0, 0, 0, 0, 0, 0],
            [0, 1, 2, 0, 1, 2],
            [0, 2, 1, 1, 0, 2],
            [0, 0, 2, 1, 2, 1],
            [0, 1, 1, 2, 2, 0],
            [0, 2, 0, 2, 1, 1]
        ])
    );
    let two = json(&fuglede(&["fuglede", "dim3", "--p", "2"]));
    assert_eq!(two["nodes_explored"], 0);
    assert_eq!(code(&fuglede(&["fuglede", "dim3", "--p", "5"])), 2);
    let attempt = fuglede(&["fuglede", "dim3", "--p", "5", "--attempt", "--max-nodes", "5000"]);
    assert_eq!(code(&attempt), 2);
    assert_eq!(json(&attempt)["verdict"], "budget_exceeded");
}

#[test]
fn budget_flags_and_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_fuglede"));
        cmd.args(["fuglede", "brute", "--p", "3", "--d", "2", "--all-sizes"]);
        if let Some(e) = env {
            cmd.env("FUGLEDE_MAX_NODES", e);
        } else {
            cmd.env_remove("FUGLEDE_MAX_NODES");
        }
        if let Some(f) = flag {
            cmd.args(["--max-nodes", f]);
        }
        cmd.output().unwrap()
    };
    assert_eq!(code(&run(None, None)), 0);
    assert_eq!(code(&run(Some("3"), None)), 2);
    assert_eq!(code(&run(Some("3"), Some("100000000"))), 0);
    let out = fuglede(&[
        "--threads",
        "2",
        "fuglede",
        "brute",
        "--p",
        "2",
        "--d",
        "3",
        "--all-sizes",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["details"]["spectral_sizes"], serde_json::json!([1, 2, 4, 8]));
    assert_eq!(
        code(&fuglede(&[
            "fuglede",
            "brute",
            "--p",
            "3",
            "--d",
            "2",
            "--max-seconds",
            "-1"
        ])),
        2
    );
}

#[test]
fn davey_commands() {
    let m = fuglede(&[
        "davey",
        "from-rows",
        "--p",
        "3",
        "--x",
        "0,1,2,0,1,2",
        "--y",
        "0,2,1,1,0,2",
    ]);
    assert_eq!(code(&m), 0);
    assert_eq!(json(&m)["weight"], 2);
    let check = fuglede_stdin(&["davey", "check"], &m.stdout);
    assert_eq!(code(&check), 0);
    let dec = fuglede_stdin(&["davey", "decompose"], &m.stdout);
    assert_eq!(code(&dec), 0);
    assert!(json(&dec)["decomposition"]["s"].is_array());
    let bad = fuglede_stdin(&["davey", "check"], b"[[1,0],[1,0]]");
    assert_eq!(code(&bad), 1);
    let en = fuglede(&["davey", "enumerate", "--p", "3", "--m", "2"]);
    assert_eq!(json(&en)["count"], 6);
    let unbalanced = fuglede(&["davey", "from-rows", "--p", "3", "--x", "0,0,0", "--y", "0,1,2"]);
    assert_eq!(code(&unbalanced), 2);
}

#[test]
fn balanced_commands() {
    assert_eq!(
        code(&fuglede(&["balanced", "check", "--p", "3", "--vector", "2,0,1"])),
        0
    );
    assert_eq!(
        code(&fuglede(&["balanced", "check", "--p", "3", "--vector", "2,0,0"])),
        1
    );
    let c = fuglede(&[
        "balanced",
        "certificate",
        "--p",
        "5",
        "--vector",
        "4,3,2,1,0,-1,-2,-3,-4,0",
    ]);
    assert_eq!(code(&c), 0);
    assert_eq!(json(&c)["m"], 2);
    assert_eq!(
        code(&fuglede(&["balanced", "certificate", "--p", "3", "--vector", "0,1"])),
        2
    );
}

#[test]
fn reproduce_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.md");
    let out = fuglede(&["reproduce-paper", "--only", "4,7", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(&path).unwrap();
    assert!(report.contains("| 4 |") && report.contains("| 7 |") && !report.contains("| 5 |"));
    assert!(!report.contains("FAIL"));
    assert_eq!(json(&out)["criteria"].as_array().unwrap().len(), 2);
    assert_eq!(code(&fuglede(&["reproduce", "--only", "12"])), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&fuglede(&["brock"])), 2);
    assert_eq!(code(&fuglede(&["no-such-command"])), 2);
    assert_eq!(code(&fuglede(&["--help"])), 0);
}
