//! End-to-end tests of the `q2r` binary: pipelines, exit codes, JSON output.

use std::io::Write as _;
use std::process::{Command, Stdio};

const BIN: &str = env!("CARGO_BIN_EXE_q2r");

/// Run the binary with `args`, feeding `stdin`; return (exit code, stdout, stderr).
fn q2r(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut child = Command::new(BIN)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child.stdin.as_mut().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn ring_pipes_into_period() {
    let (code, bundle, _) = q2r(&["ring", "7"], "");
    assert_eq!(code, 0);
    assert!(bundle.contains("# ports: 1+ 8-"));
    let (code, report, _) = q2r(&["period"], &bundle);
    assert_eq!(code, 0);
    assert_eq!(report.trim(), "period=7 preperiod=0 cap_hit=false");
}

#[test]
fn composite_carries_its_sidecar_comments() {
    let (code, bundle, _) = q2r(&["composite", "3", "5", "7"], "");
    assert_eq!(code, 0);
    assert!(bundle.contains("# expected-period: 105"));
    assert!(bundle.contains("# ports:"));
    assert!(bundle.contains("# balancers:"));
    let (code, report, _) = q2r(&["period", "--json"], &bundle);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(v["period"], 105);
    assert_eq!(v["preperiod"], 0);
}

#[test]
fn torus_simulation_conserves_energy() {
    let (code, bundle, _) = q2r(&["torus", "4", "4"], "");
    assert_eq!(code, 0);
    let (code, out, _) =
        q2r(&["simulate", "-t", "50", "--audit-energy", "--json"], &bundle);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["energy_initial"], v["energy_final"]);
}

#[test]
fn simulate_trace_walks_the_three_ring_orbit() {
    let (_, bundle, _) = q2r(&["ring", "3"], "");
    let (code, out, _) = q2r(&["simulate", "-t", "3", "--trace"], &bundle);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines, ["t=0 100000", "t=1 110001", "t=2 111011", "t=3 100000"]);

    let (code, out, _) = q2r(&["simulate", "-t", "2", "--trace", "--audit-energy"], &bundle);
    assert_eq!(code, 0);
    assert!(out.lines().all(|l| l.ends_with("E=-2")), "constant energy per line:\n{out}");
}

#[test]
fn generator_bundles_reparse_canonically() {
    for args in [&["ring", "5"][..], &["composite", "3", "5"], &["torus", "4", "4"]] {
        let (code, text, _) = q2r(args, "");
        assert_eq!(code, 0);
        let bundle = q2r::parse_bundle(&text).unwrap();
        let stripped: String =
            text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
        assert_eq!(q2r::write_bundle(&bundle), stripped, "re-serialization differs for {args:?}");
    }
    let (_, text, _) = q2r(&["ring", "5"], "");
    assert_eq!(q2r::parse_bundle(&text).unwrap().network.len(), 10);
    let (_, text, _) = q2r(&["torus", "4", "4"], "");
    assert_eq!(q2r::parse_bundle(&text).unwrap().network.len(), 16);
}

#[test]
fn period_below_the_cap_reports_and_exits_one() {
    let (_, bundle, _) = q2r(&["composite", "3", "5"], "");
    let (code, out, _) = q2r(&["period", "--cap", "4"], &bundle);
    assert_eq!(code, 1);
    assert!(out.contains("cap_hit=true"));
}

#[test]
fn compile_then_pred_says_yes_then_no() {
    let circuit = "input 1\ninput 2\ngate 3 or 1 2\noutput 3\nassign 1=1 2=0\n";
    let (code, bundle, _) = q2r(&["compile"], circuit);
    assert_eq!(code, 0);
    assert!(bundle.contains("pred t=4"));
    let (code, out, _) = q2r(&["pred"], &bundle);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "yes");

    let (code, bundle, _) = q2r(&["compile", "--assign", "1=0,2=0"], circuit);
    assert_eq!(code, 0);
    let (code, out, _) = q2r(&["pred"], &bundle);
    assert_eq!(code, 1);
    assert_eq!(out.trim(), "no");
}

#[test]
fn compile_rejects_an_ambiguous_output_choice() {
    let circuit = "input 1\ninput 2\ngate 3 or 1 2\ngate 4 or 2 1\noutput 3\noutput 4\n";
    let (code, _, err) = q2r(&["compile"], circuit);
    assert_eq!(code, 3);
    assert!(err.contains("--output"));
    let (code, bundle, _) = q2r(&["compile", "--output", "4"], circuit);
    assert_eq!(code, 0);
    assert!(bundle.contains("pred"));
}

#[test]
fn ps_build_emits_roles_and_verify_passes() {
    let (_, bundle, _) = q2r(&["ring", "3"], "");
    let (code, lifted, _) = q2r(&["ps", "build"], &bundle);
    assert_eq!(code, 0);
    assert!(lifted.contains("role 1 I 1"));
    assert!(lifted.contains("# original: n=6 alpha=1"));
    let (code, report, _) = q2r(&["ps", "verify", "-t", "25"], &bundle);
    assert_eq!(code, 0);
    assert!(report.contains("ok"));
}

#[test]
fn certify_gadgets_lists_the_whole_library() {
    let (code, out, _) = q2r(&["certify-gadgets"], "");
    assert_eq!(code, 0);
    for kind in ["WIRE", "AND", "XOR", "NOT", "OR", "CROSSOVER"] {
        assert!(out.contains(kind), "missing {kind} in:\n{out}");
    }
    let (code, out, _) = q2r(&["certify-gadgets", "--tamper"], "");
    assert_eq!(code, 0);
    assert!(out.contains("rejected 7/7"));
}

#[test]
fn verify_all_reports_a_single_criterion_as_json() {
    let (code, out, _) = q2r(&["verify-all", "--criterion", "2", "--json"], "");
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["index"], 2);
    assert_eq!(v[0]["passed"], true);
}

#[test]
fn bad_inputs_exit_three_and_bad_usage_exits_two() {
    let (code, _, err) = q2r(&["ring", "4"], "");
    assert_eq!(code, 3);
    assert!(err.contains("not prime"));

    let (code, _, _) = q2r(&["period"], "not a bundle");
    assert_eq!(code, 3);

    let (code, _, _) = q2r(&["torus", "5", "4"], "");
    assert_eq!(code, 3);

    let (code, _, _) = q2r(&["frobnicate"], "");
    assert_eq!(code, 2);
}

#[test]
fn period_without_a_configuration_is_rejected() {
    let (_, bundle, _) = q2r(&["torus", "4", "4"], "");
    let (code, _, err) = q2r(&["period"], &bundle);
    assert_eq!(code, 3);
    assert!(err.contains("no configuration"));
}
