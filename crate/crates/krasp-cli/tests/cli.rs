//! End-to-end command tests against the built binary. Artifacts written by
//! one subcommand are consumed by the next, and outputs are byte-stable.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn krasp(args: &[&str], dir: &PathBuf) -> Output {
    Command::new(env!("CARGO_BIN_EXE_krasp"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("krasp-cli-{name}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn answersets_prints_each_set() {
    let dir = workdir("answersets");
    fs::write(dir.join("b.lp"), "a :- not b.\nb :- not a.\n").unwrap();
    let out = krasp(&["answersets", "b.lp"], &dir);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "{a}\n{b}\n");
}

#[test]
fn inconsistent_program_is_a_successful_answer() {
    let dir = workdir("inconsistent");
    fs::write(dir.join("r.lp"), "1 :- not 1.\n").unwrap();
    let out = krasp(&["answersets", "r.lp"], &dir);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "no answer sets\n");
}

#[test]
fn classify_reports_levels() {
    let dir = workdir("classify");
    fs::write(dir.join("c.lp"), "a.\nb :- a.\nc :- a, b.\n").unwrap();
    let out = krasp(&["classify", "c.lp"], &dir);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "positive: yes\ntight: yes\nlevels: a:0, b:1, c:2\n"
    );
}

#[test]
fn charaut_outputs_are_stable() {
    let dir = workdir("charaut");
    fs::write(dir.join("b.lp"), "a :- not b.\nb :- not a.\n").unwrap();
    let text1 = stdout(&krasp(&["charaut", "b.lp"], &dir));
    let text2 = stdout(&krasp(&["charaut", "b.lp"], &dir));
    assert_eq!(text1, text2);
    assert!(text1.contains("{a} --{a,b}--> {}"));
    let dot = stdout(&krasp(&["charaut", "b.lp", "--dot"], &dir));
    assert!(dot.starts_with("digraph {"));
    let json = stdout(&krasp(&["charaut", "b.lp", "--json"], &dir));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["states"][3], "{a,b}");
}

#[test]
fn canonical_forms() {
    let dir = workdir("canonical");
    let program = stdout(&krasp(&["canonical", "reset"], &dir));
    assert_eq!(program, "1 :- not 1.\n");
    let aut = stdout(&krasp(
        &["canonical", "standard", "3", "--as-automaton"],
        &dir,
    ));
    let v: serde_json::Value = serde_json::from_str(&aut).unwrap();
    assert_eq!(v["inputs"], serde_json::json!(["s0", "s1", "s2"]));
    // missing size is a domain error with a clear message
    let out = krasp(&["canonical", "standard"], &dir);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pipeline_bundle_round_trips_through_verify_and_answersets_via() {
    let dir = workdir("pipeline");
    fs::write(dir.join("b.lp"), "a :- not b.\nb :- not a.\n").unwrap();
    let out = krasp(&["kr-pipeline", "b.lp", "-o", "bundle.json"], &dir);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("verified"));

    // split the bundle into the verifier's three inputs
    let bundle: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("bundle.json")).unwrap()).unwrap();
    assert_eq!(bundle["status"], "verified");
    fs::write(dir.join("prod.json"), bundle["spec"].to_string()).unwrap();
    fs::write(dir.join("target.json"), bundle["target"].to_string()).unwrap();
    fs::write(dir.join("cert.json"), bundle["certificate"].to_string()).unwrap();

    let out = krasp(
        &[
            "verify",
            "--product",
            "prod.json",
            "--target",
            "target.json",
            "--cert",
            "cert.json",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("verified:"));

    let out = krasp(
        &[
            "answersets-via",
            "--program",
            "b.lp",
            "--bundle",
            "bundle.json",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "{a}\n{b}\n");
}

#[test]
fn inconclusive_decomposition_exits_three() {
    let dir = workdir("inconclusive");
    fs::write(dir.join("e.lp"), "e :- e.\ne :- not e.\n").unwrap();
    let out = krasp(&["kr-pipeline", "e.lp", "-o", "e.json"], &dir);
    assert_eq!(out.status.code(), Some(3));
    let bundle: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("e.json")).unwrap()).unwrap();
    assert_eq!(bundle["status"], "inconclusive");
}

#[test]
fn compile_positive_bundle_feeds_answersets_via() {
    let dir = workdir("compile");
    fs::write(dir.join("c.lp"), "a.\nb :- a.\nc :- a, b.\n").unwrap();
    let out = krasp(&["compile-positive", "c.lp", "-o", "c.json"], &dir);
    assert_eq!(out.status.code(), Some(0));
    let out = krasp(
        &["answersets-via", "--program", "c.lp", "--bundle", "c.json"],
        &dir,
    );
    assert_eq!(stdout(&out), "{a,b,c}\n");
}

#[test]
fn product_step_walks_the_chain() {
    let dir = workdir("step");
    fs::write(dir.join("c.lp"), "a.\nb :- a.\nc :- a, b.\n").unwrap();
    krasp(&["compile-positive", "c.lp", "-o", "c.json"], &dir);
    let bundle: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("c.json")).unwrap()).unwrap();
    fs::write(dir.join("prod.json"), bundle["spec"].to_string()).unwrap();
    let mut state = "({},{},{})".to_string();
    let mut trace = Vec::new();
    for _ in 0..3 {
        let out = krasp(
            &[
                "product-step",
                "prod.json",
                "--state",
                &state,
                "--input",
                "{}",
            ],
            &dir,
        );
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        state = stdout(&out).trim().to_string();
        trace.push(state.clone());
    }
    assert_eq!(trace, ["({1},{},{})", "({1},{1},{})", "({1},{1},{1})"]);
}

#[test]
fn corrupted_certificate_fails_verification() {
    let dir = workdir("corrupt");
    fs::write(dir.join("b.lp"), "a :- not b.\nb :- not a.\n").unwrap();
    krasp(&["kr-pipeline", "b.lp", "-o", "bundle.json"], &dir);
    let bundle: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("bundle.json")).unwrap()).unwrap();
    fs::write(dir.join("prod.json"), bundle["spec"].to_string()).unwrap();
    fs::write(dir.join("target.json"), bundle["target"].to_string()).unwrap();
    let mut cert = bundle["certificate"].clone();
    let h1 = cert["h1"].as_array().unwrap().clone();
    cert["h1"] = serde_json::json!([h1[1], h1[0], h1[2], h1[3]]);
    fs::write(dir.join("cert.json"), cert.to_string()).unwrap();
    let out = krasp(
        &[
            "verify",
            "--product",
            "prod.json",
            "--target",
            "target.json",
            "--cert",
            "cert.json",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAILED"));
}

#[test]
fn tn_embed_reports_equation_count() {
    let dir = workdir("tn");
    let out = krasp(&["tn-embed", "2"], &dir);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "embedding verified: n=2, 8 equations checked\n"
    );
    let out = krasp(&["tn-embed", "4"], &dir);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    let dir = workdir("usage");
    let out = krasp(&["no-such-command"], &dir);
    assert_eq!(out.status.code(), Some(2));
    let out = krasp(&["answersets"], &dir);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn decompose_accepts_automaton_files() {
    let dir = workdir("decompose");
    // the two-letter flip automaton
    let flip = serde_json::json!({
        "states": ["1", "2"],
        "inputs": ["x", "y"],
        "delta": [[1, 1], [0, 0]],
    });
    fs::write(dir.join("flip.json"), flip.to_string()).unwrap();
    let out = krasp(&["decompose", "flip.json", "-o", "out.json"], &dir);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("standard(2) x1"));
    // bundle verifies through the verifier
    let bundle: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("out.json")).unwrap()).unwrap();
    fs::write(dir.join("prod.json"), bundle["spec"].to_string()).unwrap();
    fs::write(dir.join("target.json"), bundle["target"].to_string()).unwrap();
    fs::write(dir.join("cert.json"), bundle["certificate"].to_string()).unwrap();
    let out = krasp(
        &[
            "verify",
            "--product",
            "prod.json",
            "--target",
            "target.json",
            "--cert",
            "cert.json",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(0));
}
