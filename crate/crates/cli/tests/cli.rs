use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).to_string_lossy().into_owned()
}

fn hbm_with(args: &[&str], stdin: Option<&str>, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hbm"));
    for v in ["HBM_FIELD", "HBM_SEED", "HBM_HORIZON", "HBM_SI_STRATEGY", "HBM_MC_TRIALS", "HBM_FORMAT"] {
        cmd.env_remove(v);
    }
    cmd.envs(env.iter().copied()).args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    let mut child = cmd.spawn().expect("hbm runs");
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn hbm(args: &[&str]) -> Output {
    hbm_with(args, None, &[])
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

fn kinds(report: &Value, key: &str) -> Vec<String> {
    report[key]["verdicts"].as_array().unwrap().iter().map(|v| v["kind"].as_str().unwrap().to_string()).collect()
}

const E: &str = "essential";
const S: &str = "strongly_inessential";
const I: &str = "inessential";

#[test]
fn build_reports_the_three_step_profile() {
    let o = hbm(&["build", &fixture("three_lines_3.json")]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("nu by degree: (3,1,1,1) in degrees (5,6,9,10)"));
    let j = json(&hbm(&["--format", "json", "build", &fixture("three_lines_3.json")]));
    let nu: Vec<u64> = j["profile"]["nu_by_degree"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).collect();
    assert_eq!(nu, [3, 1, 1, 1]);
    assert_eq!(j["classification"]["e_maximal"], true);
    assert_eq!(j["si_observed"]["total"], 2);
    assert_eq!(j["status"], "ok");
}

#[test]
fn build_without_factors_has_no_si_elements() {
    let o = hbm(&["--format", "json", "build", &fixture("no_factors.json")]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    assert!(j["notes"][0].as_str().unwrap().contains("no s.i. elements"));
    assert_eq!(j["si_observed"]["total"], 0);
}

#[test]
fn classify_the_one_step_matrix() {
    for file in ["one_step_matrix.json", "one_step_datum.json"] {
        let j = json(&hbm(&["--format", "json", "classify", &fixture(file)]));
        assert_eq!(kinds(&j, "classification"), [E, S, S, E, S, E, E], "{file}");
        assert_eq!(j["classification"]["essential"], 4);
        assert_eq!(j["classification"]["strongly_inessential"], 3);
        assert_eq!(j["classification"]["e_maximal"], true);
    }
}

#[test]
fn classify_flags_a_basis_that_is_not_e_maximal() {
    let o = hbm(&["classify", &fixture("one_step_replaced_factor.json")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("e-maximal: NO"));
    let j = json(&hbm(&["--format", "json", "classify", &fixture("one_step_replaced_factor.json")]));
    assert_eq!(j["classification"]["e_maximal"], false);
    assert_eq!(kinds(&j, "classification")[5], I);
}

#[test]
fn classify_an_essential_only_matrix() {
    let input = r#"{"entries": [["Y^2", "-X^2"]]}"#;
    let o = hbm_with(&["--format", "json", "classify", "-"], Some(input), &[]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    assert_eq!(j["classification"]["strongly_inessential"], 0);
    assert_eq!(j["classification"]["e_maximal"], true);
}

#[test]
fn split_serializes_both_blocks() {
    let j = json(&hbm(&["--format", "json", "split", &fixture("three_lines_2.json"), "--p", "8"]));
    assert_eq!(j["status"], "ok");
    assert_eq!(j["d"], "X*Y");
    assert_eq!(j["m_prime"]["entries"].as_array().unwrap().len(), 5);
    assert_eq!(j["m_prime"]["col_degrees"].as_array().unwrap().len(), 6);
    assert_eq!(j["m_second"]["col_degrees"], serde_json::json!([2, 10, 10]));
    assert_eq!(kinds(&j, "classification_prime"), [E, E, E, S, I, E]);
    let w = &j["classification_prime"]["verdicts"][4]["witness"];
    assert_eq!(w["type"], "replacement");
}

#[test]
fn split_outputs_reload_as_matrices() {
    let j = json(&hbm(&["--format", "json", "split", &fixture("three_lines_2.json"), "--p", "8"]));
    let again = hbm_with(&["--format", "json", "classify", "-"], Some(&j["m_prime"].to_string()), &[]);
    assert_eq!(kinds(&json(&again), "classification"), [E, E, E, S, I, E]);
}

#[test]
fn prescribe_rejects_too_low_a_degree() {
    let o = hbm(&["prescribe", "--degrees", "3", "--counts", "2"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("d_1 > r_1 + ... + r_s + 1"), "{err}");
    let j = json(&hbm(&["--format", "json", "prescribe", "--degrees", "3", "--counts", "2"]));
    assert_eq!(j["error"]["kind"], "infeasible");
}

#[test]
fn prescribe_realises_the_counts() {
    let o = hbm(&["--format", "json", "prescribe", "--degrees", "6,8", "--counts", "1,1", "--alternatives", "3"]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    let data = j["data"].as_array().unwrap();
    assert!(data.len() > 1);
    for d in data {
        assert_eq!(d["observed"]["per_degree"], serde_json::json!({"6": 1, "8": 1}));
    }
}

#[test]
fn lift_i11_at_t2() {
    let j = json(&hbm(&["--format", "json", "lift", "--kind", "I11", "--t", "2"]));
    assert_eq!(j["status"], "ok");
    assert_eq!(j["profile"]["multiplicity"], 9);
    assert_eq!(j["classification"]["strongly_inessential"], 1);
    assert_eq!(j["membership"]["member"], true);
    let from_file = json(&hbm(&["--format", "json", "lift", &fixture("lift_i11_t2.json")]));
    assert_eq!(from_file["matrix"], j["matrix"]);
}

#[test]
fn lift_general_from_flags() {
    let j = json(&hbm(&["--format", "json", "lift", "--kind", "general", "--ts", "2,1,1,1"]));
    assert_eq!(j["status"], "ok");
    assert_eq!(j["classification"]["strongly_inessential"], 2);
    let bad = hbm(&["lift", "--kind", "general"]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn quotient_by_z_and_by_a_non_regular_form() {
    let o = hbm(&["--format", "json", "quotient", &fixture("lift_i11_t2.json")]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    assert_eq!(j["quotient"]["monotone"], true);
    assert_eq!(j["image"]["vars"], 2);
    assert_eq!(code(&hbm(&["quotient", &fixture("lift_i11_t2.json"), "--linear", "X"])), 2);
    assert_eq!(code(&hbm(&["quotient", &fixture("one_step_matrix.json")])), 2);
}

#[test]
fn undecided_verdicts_are_inconclusive() {
    let args = ["--si-strategy", "montecarlo", "--mc-trials", "5", "classify", &fixture("low_multiplicity_e9.json")];
    let o = hbm(&args);
    assert_eq!(code(&o), 3, "{}", stdout(&o));
    assert!(stdout(&o).contains("status: inconclusive"));
}

#[test]
fn reports_are_byte_identical_and_record_the_seed() {
    let args = ["--format", "json", "--si-strategy", "montecarlo", "--mc-trials", "300", "--seed", "41", "split", &fixture("three_lines_2.json"), "--p", "8"];
    let a = hbm(&args);
    let b = hbm(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["config"]["seed"], 41);
    let t = hbm(&["--seed", "41", "count-si", &fixture("three_lines_1.json")]);
    assert!(stdout(&t).lines().next().unwrap().contains("seed=41"));
    assert_eq!(t.stdout, hbm(&["--seed", "41", "count-si", &fixture("three_lines_1.json")]).stdout);
}

#[test]
fn environment_overrides() {
    let o = hbm_with(&["count-si", &fixture("one_step_datum.json")], None, &[("HBM_FORMAT", "json"), ("HBM_FIELD", "fp:7")]);
    let j = json(&o);
    assert_eq!(j["config"]["field"], "fp:7");
    assert_eq!(j["observed"], j["predicted"]);
    // flags win over the environment
    let o = hbm_with(&["--format", "text", "count-si", &fixture("one_step_datum.json")], None, &[("HBM_FORMAT", "json")]);
    assert!(stdout(&o).starts_with("hbm count-si"));
}

#[test]
fn fixtures_verify() {
    let o = hbm(&["verify-all", &fixtures().to_string_lossy()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(!stdout(&o).contains("[fail"));
}

#[test]
fn a_wrong_expectation_is_a_check_failure() {
    let dir = std::env::temp_dir().join(format!("hbm-fixtures-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let body = std::fs::read_to_string(fixtures().join("three_lines_1.json")).unwrap();
    std::fs::write(dir.join("wrong.json"), body.replace("\"si_total\": 3", "\"si_total\": 4")).unwrap();
    let o = hbm(&["verify-all", &dir.to_string_lossy()]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).contains("s.i. total: got 3, expected 4"));
}

#[test]
fn adversarial_inputs_are_input_errors() {
    let cases = [
        ("build", "{\"beta0\": 1,"),
        ("build", "[]"),
        ("build", "{}"),
        ("build", r#"{"entries": [["X"]]}"#),
        ("build", r#"{"beta0": 0, "gaps": [1], "phis": [[{"lin": "X", "mu": 2}]], "U": "X", "Ls": ["Y"]}"#),
        ("build", r#"{"beta0": 0, "gaps": [1], "phis": [[{"lin": "X^2", "mu": 1}]], "U": "Y", "Ls": ["X+Y"]}"#),
        ("build", r#"{"beta0": 0, "gaps": [1], "phis": [[{"lin": [1, 2, 3], "mu": 1}]], "U": "Y", "Ls": ["X+Y"]}"#),
        ("classify", r#"{"entries": 3}"#),
        ("classify", r#"{"entries": [["X+Y^2", "Y"]]}"#),
        ("classify", r#"{"entries": [["X", "Y"], ["X"]]}"#),
        ("classify", r#"{"entries": [["X", "Q"]]}"#),
        ("classify", r#"{"entries": [["1/0*X", "Y"]]}"#),
        ("count-si", r#"{"mode": "alpha3_I11", "t": 1}"#),
        ("count-si", r#"{"mode": "alpha3_I11", "t": 2, "Q": ["X", "0", "0"], "extra": 1}"#),
        ("count-si", r#"{"mode": "general", "ts": [2, 1], "P": ["X^3"]}"#),
        ("count-si", r#"{"degrees": [9, 6], "counts": [1, 1]}"#),
    ];
    for (cmd, input) in cases {
        let o = hbm_with(&[cmd, "-"], Some(input), &[]);
        assert_eq!(code(&o), 2, "{cmd} {input}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(code(&hbm(&["--field", "fp:4", "build", &fixture("no_factors.json")])), 2);
    assert_eq!(code(&hbm(&["--si-strategy", "guess", "build", &fixture("no_factors.json")])), 2);
    assert_eq!(code(&hbm(&["build", "/nonexistent/datum.json"])), 2);
    assert_eq!(code(&hbm(&["split", &fixture("three_lines_2.json"), "--p", "20"])), 2);
}
