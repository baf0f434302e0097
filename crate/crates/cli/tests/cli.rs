use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use credal_cli::ProblemSpec;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn credal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_credal")).args(args).env_remove("CREDAL_TOL").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn temp_spec(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn three_state() -> String {
    data("three_state.json").display().to_string()
}

#[test]
fn max_likelihood_posterior_on_example() {
    let o = credal(&["update", &three_state(), "--event", "E", "--rule", "ml"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "vertex,w1,w2,w3");
    assert_eq!(rows[1], "1,0.5,0.5,0");
    assert_eq!(rows[2], "");
    assert!(out.contains("bet,0.5\n"));
}

#[test]
fn rml_zero_and_full_bayes_print_the_same_bytes() {
    for format in ["csv", "md", "json"] {
        let a =
            credal(&["update", &three_state(), "--event", "E", "--rule", "rml", "--alpha", "0", "--format", format]);
        let b = credal(&["update", &three_state(), "--event", "E", "--rule", "fb", "--format", format]);
        assert!(a.status.success() && b.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn missing_event_flag_exits_two_naming_it() {
    let o = credal(&["update", &three_state()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--event"));
}

#[test]
fn unknown_names_exit_four() {
    let o = credal(&["update", &three_state(), "--event", "F"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("`F`"));
    let o = credal(&["axioms", &three_state(), "--axiom", "CR-Z"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn null_event_exits_three() {
    let spec = temp_spec(
        r#"{"states": ["w1", "w2", "w3"],
            "credal": [[0.5, 0.0, 0.5], [0.0, 0.5, 0.5]],
            "events": {"A": ["w1"]}}"#,
    );
    let o = credal(&["update", spec.path().to_str().unwrap(), "--event", "A", "--rule", "fb"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("strict-nonnull"));
}

#[test]
fn malformed_specs_exit_two() {
    let spec = temp_spec("{not json");
    let o = credal(&["update", spec.path().to_str().unwrap(), "--event", "E"]);
    assert_eq!(o.status.code(), Some(2));
    let spec = temp_spec(r#"{"states": ["a", "b"], "credal": [[0.5, 0.5]], "prior": []}"#);
    let o = credal(&["update", spec.path().to_str().unwrap(), "--event", "E"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("prior"));
    let spec = temp_spec(r#"{"states": ["a", "b"], "credal": [[0.7, 0.5]], "events": {"E": ["a"]}}"#);
    let o = credal(&["update", spec.path().to_str().unwrap(), "--event", "E"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("credal[0]"));
    let o = credal(&["update", "/nonexistent/spec.json", "--event", "E"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tolerance_variable_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_credal"))
        .args(["update", &three_state(), "--event", "E"])
        .env("CREDAL_TOL", "nope")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_credal"))
        .args(["update", &three_state(), "--event", "E"])
        .env("CREDAL_TOL", "1e-7")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).contains("1,0.5,0.5,0"));
}

#[test]
fn output_ignores_key_order_in_the_spec() {
    let a = temp_spec(
        r#"{"states": ["w1", "w2", "w3"],
            "credal": [[0.5, 0.0, 0.5], [0.0, 0.5, 0.5], [0.3, 0.45, 0.25]],
            "acts": {"f": [1, 2, 3], "g": [3, 1, 0]},
            "events": {"E": ["w1", "w2"], "F": ["w2", "w3"]}}"#,
    );
    let b = temp_spec(
        r#"{"events": {"F": ["w2", "w3"], "E": ["w1", "w2"]},
            "acts": {"g": [3, 1, 0], "f": [1, 2, 3]},
            "credal": [[0.3, 0.45, 0.25], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]],
            "states": ["w1", "w2", "w3"]}"#,
    );
    let x = credal(&["update", a.path().to_str().unwrap(), "--event", "E"]);
    let y = credal(&["update", b.path().to_str().unwrap(), "--event", "E"]);
    assert!(x.status.success());
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn spec_round_trips() {
    for name in ["three_state.json", "divergence.json", "signals.json", "persuasion.json"] {
        let spec = ProblemSpec::load(&data(name)).unwrap();
        let again = ProblemSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(spec, again);
        assert_eq!(spec.to_json(), again.to_json());
    }
}

#[test]
fn table_rows_and_comparisons() {
    let o = credal(&[
        "table1",
        "--beta",
        "0.6",
        "--lambda1",
        "0.8",
        "--lambda2",
        "0.6",
        "--alpha",
        "0.5",
        "--format",
        "csv",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.ends_with(",equal")));

    let o = credal(&[
        "table1",
        "--beta",
        "0.5",
        "--lambda1",
        "0.8",
        "--lambda2",
        "0.6",
        "--alpha",
        "0,0.3,1",
        "--format",
        "csv",
    ]);
    let out = stdout(&o);
    let tails: Vec<String> = out
        .lines()
        .skip(1)
        .map(|r| {
            let cells: Vec<&str> = r.split(',').collect();
            format!("{},{}", cells[0], cells[2..].join(","))
        })
        .collect();
    assert_eq!(tails[0], tails[1]);
    assert_eq!(tails[1], tails[2]);
    assert_eq!(tails[3], tails[5]);

    let o = credal(&["table1", "--beta", "0.6", "--lambda1", "0.8", "--lambda2", "0.6"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn table_reads_the_signal_block() {
    let o = credal(&["table1", "--spec", data("signals.json").to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 12);
}

#[test]
fn axiom_reports() {
    let o = credal(&["axioms", &three_state(), "--axiom", "CR-C", "--rule", "fb", "--samples", "200"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["passed"], true);

    let o = credal(&["axioms", &three_state(), "--axiom", "CR-B", "--samples", "200"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["passed"], false);
    assert!(v[0]["witness"]["f"].is_array());

    let args = [
        "axioms",
        &three_state(),
        "--axiom",
        "DC-CS,CR-UO",
        "--rule",
        "rml",
        "--alpha",
        "0.4",
        "--seed",
        "7",
        "--samples",
        "200",
    ];
    let a = credal(&args);
    let b = credal(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn persuasion_rows() {
    let o = credal(&["persuasion", "--lambda", "0,0.6,0.9", "--alpha", "0.1,0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let find = |prefix: &str| out.lines().find(|l| l.starts_with(prefix)).unwrap().to_string();
    assert!(find("0.6,0.5,").ends_with(",0.6,true"));
    assert!(find("0.9,0.1,").ends_with(",0.3,false"));
    assert!(find("0,0.1,").ends_with(",0.5,false"));
    assert!(find("0,0.5,").ends_with(",0.5,false"));
    let spec = credal(&["persuasion", "--spec", data("persuasion.json").to_str().unwrap()]);
    assert_eq!(stdout(&spec).lines().count(), 7);
}

#[test]
fn divergence_report() {
    let spec = data("divergence.json");
    let o = credal(&["divergence", spec.to_str().unwrap(), "--event", "E", "--alpha", "1", "--grid", "500"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).lines().nth(1).unwrap().ends_with(",false"));
    let o = credal(&["divergence", spec.to_str().unwrap(), "--event", "E", "--alpha", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}
