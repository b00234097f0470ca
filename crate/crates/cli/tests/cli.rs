use std::path::PathBuf;
use std::process::{Command, Output};

fn padlock(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padlock"))
        .args(args)
        .output()
        .expect("spawn padlock")
}

fn stdout(args: &[&str]) -> String {
    let out = padlock(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn golden_outputs() {
    assert_eq!(
        stdout(&["bounds", "--k", "6", "--n", "11"]),
        golden("bounds_6_11.json")
    );
    assert_eq!(
        stdout(&["table", "--n", "11", "--k-max", "11"]),
        golden("table_n11.csv")
    );
    assert_eq!(
        stdout(&["construct", "--scheme", "bose", "--n", "12", "--verify"]),
        golden("bose_12.jsonl")
    );
    assert_eq!(
        stdout(&["knot", "--build", "2", "4"]),
        golden("knot_2_4.json")
    );
    assert_eq!(
        stdout(&[
            "construct",
            "--scheme",
            "dnf",
            "--formula",
            "A.B + A.C + B.D + E"
        ]),
        golden("dnf_example.json")
    );
}

#[test]
fn bounds_six_of_eleven_are_tight() {
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&["bounds", "--k", "6", "--n", "11"])).unwrap();
    assert_eq!(v["lower"], 11);
    assert_eq!(v["upper"], 11);
}

#[test]
fn construct_then_verify_round_trips() {
    for (scheme, k, n) in [
        ("bose", "3", "12"),
        ("two", "2", "9"),
        ("daisy", "2", "8"),
        ("recursive", "3", "10"),
    ] {
        let inline = stdout(&[
            "construct",
            "--scheme",
            scheme,
            "--k",
            k,
            "--n",
            n,
            "--verify",
        ]);
        let path = scratch(&format!("{scheme}.jsonl"));
        std::fs::write(&path, &inline).unwrap();
        let report = stdout(&["verify", "--system", path.to_str().unwrap(), "--k", k]);
        assert_eq!(
            inline.lines().nth(1).unwrap(),
            report.trim_end(),
            "{scheme}"
        );
    }
}

#[test]
fn share_output_is_deterministic_per_seed() {
    let system = scratch("direct_2_3.json");
    stdout(&[
        "construct",
        "--scheme",
        "direct",
        "--k",
        "2",
        "--n",
        "3",
        "--out",
        system.to_str().unwrap(),
    ]);
    let sys = system.to_str().unwrap();
    let a = stdout(&["share", "--system", sys, "--secret", "3", "--seed", "42"]);
    let b = stdout(&["share", "--system", sys, "--secret", "3", "--seed", "42"]);
    assert_eq!(a, b);

    let shares = scratch("direct_2_3.shares.json");
    std::fs::write(&shares, &a).unwrap();
    let sh = shares.to_str().unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&[
        "reconstruct",
        "--system",
        sys,
        "--shares",
        sh,
        "--coalition",
        "0,2",
    ]))
    .unwrap();
    assert_eq!(v["opens"], true);
    assert_eq!(v["secret"], 3);
    let v: serde_json::Value = serde_json::from_str(&stdout(&[
        "reconstruct",
        "--system",
        sys,
        "--shares",
        sh,
        "--coalition",
        "1",
    ]))
    .unwrap();
    assert_eq!(v["opens"], false);
    assert!(v["secret"].is_null());
}

#[test]
fn knot_verify_reads_word_files() {
    let word = scratch("commutator.txt");
    std::fs::write(&word, "x1 x2 x1' x2'\n").unwrap();
    let w = word.to_str().unwrap();
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&["knot", "--verify", w, "--k", "1", "--n", "2"])).unwrap();
    assert_eq!(v["verdict"], true);
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&["knot", "--verify", w, "--k", "2", "--n", "2"])).unwrap();
    assert_eq!(v["verdict"], false);
    assert_eq!(v["failing_closed"], serde_json::json!([0]));
}

#[test]
fn false_verdict_still_exits_zero() {
    let path = scratch("daisy_6.json");
    stdout(&[
        "construct",
        "--scheme",
        "daisy",
        "--n",
        "6",
        "--out",
        path.to_str().unwrap(),
    ]);
    let out = padlock(&["verify", "--system", path.to_str().unwrap(), "--k", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], false);
}

#[test]
fn malformed_input_names_the_path() {
    let path = scratch("bad.json");
    std::fs::write(
        &path,
        r#"{"n":2,"padlocks":1,"circuit":{"t":"lock","id":"zero"},"keys":[[0],[0]]}"#,
    )
    .unwrap();
    let out = padlock(&["verify", "--system", path.to_str().unwrap(), "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("circuit"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        padlock(&["construct", "--scheme", "direct", "--n", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        padlock(&["bounds", "--k", "5", "--n", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(padlock(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn missing_file_exits_one() {
    let out = padlock(&["verify", "--system", "/nonexistent/system.json", "--k", "2"]);
    assert_eq!(out.status.code(), Some(1));
}
