use std::process::Command;

use qiclass::cli::RunReport;
use qiclass::dehn::replay;
use qiclass::presentation::relator;
use qiclass::words::Word;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn qiclass(args: &[&str]) -> Run {
    qiclass_env(args, None)
}

fn qiclass_env(args: &[&str], cap: Option<&str>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qiclass"));
    cmd.args(args).env_remove("QICLASS_RADIUS_CAP");
    if let Some(cap) = cap {
        cmd.env("QICLASS_RADIUS_CAP", cap);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn report(run: &Run) -> RunReport {
    serde_json::from_str(&run.stdout).unwrap_or_else(|e| panic!("{e}: {}", run.stdout))
}

#[test]
fn check_exit_codes() {
    let fail = qiclass(&["check", "--lambda", "1/100", "--max-index", "0"]);
    assert_eq!(fail.code, 1);
    assert_eq!(report(&fail).verdict, "FAIL");

    let pass = qiclass(&["check", "--lambda", "1/2", "--max-index", "0"]);
    assert_eq!(pass.code, 0);
    assert_eq!(report(&pass).verdict, "PASS");

    assert_eq!(qiclass(&["check", "--lambda", "0"]).code, 2);
    assert_eq!(qiclass(&["check", "--lambda", "1/7", "--max-index", "-1"]).code, 2);
}

#[test]
fn solve_relator_and_replay_the_trace() {
    let run = qiclass(&["solve", "a1 a2 a1^-1 a2^-1 a3 a4 a3^-1 a4^-1"]);
    assert_eq!(run.code, 0);
    let r = report(&run);
    assert_eq!(r.verdict, "trivial");
    let initial = Word::parse(r.witnesses[0]["initial"].as_str().unwrap()).unwrap();
    assert_eq!(replay(&initial, &r.trace).unwrap(), Word::empty());
}

#[test]
fn solve_in_extension() {
    let r0 = relator(0).to_string();
    let run = qiclass(&["solve", "--alpha", "1", &r0]);
    assert_eq!(run.code, 0);
    let r = report(&run);
    assert_eq!(r.witnesses[0]["final"], "");
    assert_eq!(r.witnesses[0]["z_exp"], 1);
    assert_eq!(r.verdict, "nontrivial");

    let word = format!("{} z^3 {}", relator(0), relator(1));
    let r = report(&qiclass(&["solve", "--alpha", "0,1", "--strategy", "random", "--seed", "4", &word]));
    assert_eq!(r.witnesses[0]["z_exp"], 4);
    assert_eq!(r.seed, 4);
}

#[test]
fn solve_nontrivial_and_input_errors() {
    let r = report(&qiclass(&["solve", "a1 a2^-1"]));
    assert_eq!(r.verdict, "nontrivial");
    assert!(r.trace.is_empty());
    let bad = qiclass(&["solve", "a1 q7"]);
    assert_eq!(bad.code, 2);
    assert!(bad.stderr.contains("q7"));
    assert_eq!(qiclass(&["solve", "--alpha", "1,,", "a1"]).code, 2);
}

#[test]
fn invariants_commands() {
    let r = report(&qiclass(&["invariants", "--alpha", "1", "--beta", "0,1"]));
    assert!(r.verdict.contains("distinguished"));
    let d = r.witnesses.iter().find(|w| w["kind"] == "distinguished").unwrap();
    assert_eq!(d["witness"], "0:1");

    let r = report(&qiclass(&["invariants", "--alpha", "2"]));
    assert!(r.verdict.contains("not rich"));

    let run = qiclass(&["invariants", "--alpha", "1,(0,1)*"]);
    assert_eq!(run.code, 0);
    let r = report(&run);
    assert_eq!(r.verdict, "alpha: rich");
    assert_eq!(r.bound, Some(1));

    assert_eq!(qiclass(&["invariants", "--alpha", "x"]).code, 2);
}

#[test]
fn geometry_commands() {
    let r = report(&qiclass(&["ball", "--group", "G", "--radius", "2"]));
    assert_eq!(r.counts, [1, 17, 257]);

    let r = report(&qiclass(&["compare", "--alpha", "1", "--radius", "1"]));
    assert_eq!(r.witnesses[0]["counts"], serde_json::json!([1, 19]));
    assert_eq!(r.witnesses[1]["counts"], serde_json::json!([1, 19]));

    let r = report(&qiclass(&["zpower", "--alpha", "1", "--n", "3"]));
    assert_eq!(r.verdict, "certified");
    assert_eq!(r.witnesses[0]["length"], 24);
    assert_eq!(r.bound, Some(24));

    let refused = qiclass(&["zpower", "--alpha", "2", "--n", "1"]);
    assert_eq!(refused.code, 1);
}

#[test]
fn radius_cap_from_environment() {
    let within_cap = qiclass(&["ball", "--radius", "2"]);
    assert_eq!(within_cap.code, 0);
    let refused = qiclass_env(&["ball", "--radius", "2"], Some("1"));
    assert_eq!(refused.code, 1);
    assert!(report(&refused).verdict.starts_with("refused"));
    assert_eq!(qiclass_env(&["ball", "--radius", "1"], Some("oops")).code, 2);
    // the flag wins over the environment
    assert_eq!(qiclass_env(&["ball", "--radius", "1", "--cap", "1"], Some("0")).code, 0);
}

#[test]
fn probe_torsion_and_presentation() {
    let r = report(&qiclass(&["probe-torsion", "--group", "E", "--alpha", "1", "--max-len", "1", "--max-exp", "3"]));
    assert_eq!(r.verdict, "no torsion found");
    let run = qiclass(&["presentation", "--alpha", "0,2", "--max-index", "1"]);
    let r = report(&run);
    assert_eq!(r.witnesses[1], format!("{} z^-1 z^-1", relator(1)));
    assert_eq!(r.witnesses.len(), 2 + 8);
}

#[test]
fn plain_output_and_report_keys() {
    let run = qiclass(&["--plain", "ball", "--radius", "1"]);
    assert!(run.stdout.contains("radius\t|B(r)|"));
    assert!(run.stdout.contains("1\t17"));

    let run = qiclass(&["invariants", "--alpha", "1"]);
    let value: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    for key in ["command", "inputs", "verdict", "witnesses", "trace", "counts", "bound", "seed", "elapsed_ms", "version"] {
        assert!(value.get(key).is_some(), "missing key {key}");
    }
    let round = serde_json::to_value(report(&run)).unwrap();
    assert_eq!(round, value);
}
