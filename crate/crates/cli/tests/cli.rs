//! End-to-end tests of the binary: exit codes, JSON schema stability, and
//! error reporting.

use std::io::Write;
use std::process::{Command, Output};

fn sgcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgcert")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).to_string()
}

#[test]
fn lemma_1_json_reports_max_cofactors() {
    let out = sgcert(&["lemma", "--index", "1", "--output", "json"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    let certs = parsed.as_array().expect("array of certificates");
    assert_eq!(certs.len(), 1);
    let cert = &certs[0];
    assert_eq!(cert["claim_id"], "lemma1");
    assert_eq!(cert["outcome"], "verified");
    let ranges = cert["detail"]["finite_ranges"].as_array().unwrap();
    let by_p: std::collections::HashMap<u64, u64> = ranges
        .iter()
        .map(|r| (r["p"].as_u64().unwrap(), r["certified_max_m"].as_u64().unwrap()))
        .collect();
    assert_eq!(by_p[&19], 3_784);
    assert_eq!(by_p[&23], 8);
}

#[test]
fn constants_prints_certified_enclosures() {
    let out = sgcert(&["constants"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("constants/c(2)<7.3722"), "{text}");
    assert!(text.contains("verified"));
    // intervals, never bare point approximations
    assert!(text.contains("7.372187"), "{text}");
    assert!(text.contains("(outward)"), "{text}");
}

#[test]
fn trivial_group_report() {
    let out = sgcert(&["group", "--kind", "cyclic", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("group/C1"));
    assert!(text.contains("1 subgroups"), "{text}");
}

#[test]
fn json_output_is_stable_modulo_elapsed() {
    let strip = |raw: &str| -> serde_json::Value {
        let mut v: serde_json::Value = serde_json::from_str(raw).unwrap();
        for cert in v.as_array_mut().unwrap() {
            cert["elapsed_ms"] = serde_json::Value::from(0);
        }
        v
    };
    let a = sgcert(&["constants", "--output", "json"]);
    let b = sgcert(&["constants", "--output", "json"]);
    assert_eq!(a.status.code(), Some(0));
    let va = strip(&stdout(&a));
    let vb = strip(&stdout(&b));
    assert_eq!(
        serde_json::to_string(&va).unwrap(),
        serde_json::to_string(&vb).unwrap(),
        "byte-identical after zeroing elapsed_ms"
    );
    // claims arrive sorted
    let ids: Vec<&str> =
        va.as_array().unwrap().iter().map(|c| c["claim_id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
}

#[test]
fn unknown_flag_exits_3_with_usage() {
    let out = sgcert(&["constants", "--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("--definitely-not-a-flag"));

    let out = sgcert(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn help_exits_zero() {
    let out = sgcert(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("Exit codes"));
}

#[test]
fn truncated_manifest_names_missing_interval() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    // lemma-2 range cut to m <= 10; everything else complete
    write!(
        file,
        "23 1 8\n19 1 3784\n7 2 6\n5 2 10\n5 3 2\n3 4 116\n3 5 11\n3 6 4\n3 7 1\n"
    )
    .unwrap();
    let out = sgcert(&["corollary", "--manifest", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("(p=5, a=2)"), "{err}");
    assert!(err.contains("[11, 16314]"), "{err}");
}

#[test]
fn malformed_manifest_reports_line() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "23 1 8\n19 oops 3784\n").unwrap();
    let out = sgcert(&["corollary", "--manifest", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn cayley_file_roundtrip_and_errors() {
    let mut good = tempfile::NamedTempFile::new().unwrap();
    write!(
        good,
        "name: klein4\norder: 4\ntable:\n0 1 2 3\n1 0 3 2\n2 3 0 1\n3 2 1 0\n"
    )
    .unwrap();
    let out = sgcert(&[
        "group",
        "--kind",
        "from-file",
        "--file",
        good.path().to_str().unwrap(),
        "--check-theorem",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("5 subgroups"), "{}", stdout(&out));

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    write!(bad, "order: 2\ntable:\n0 1\n1 x\n").unwrap();
    let out = sgcert(&["group", "--kind", "from-file", "--file", bad.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));
}

#[test]
fn capped_enumeration_exits_2() {
    let out = sgcert(&["group", "--kind", "symmetric", "--n", "4", "--cap", "5"]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("undetermined"));
}

#[test]
fn product_kind_builds() {
    let out = sgcert(&[
        "group",
        "--kind",
        "product",
        "--factors",
        "cyclic:3,cyclic:4",
        "--check-theorem",
        "--output",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let cert = &parsed.as_array().unwrap()[0];
    assert_eq!(cert["detail"]["order"], 12);
    // C3 x C4 = C12: tau(12) = 6 subgroups
    assert_eq!(cert["detail"]["subgroup_count"], 6);
    assert_eq!(cert["detail"]["theorem"]["outcome"], "verified");
}

#[test]
fn group_json_includes_sylow_census() {
    let out = sgcert(&["group", "--kind", "symmetric", "--n", "4", "--output", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let sylow = parsed[0]["detail"]["sylow"].as_array().unwrap();
    let two = sylow.iter().find(|s| s["p"] == 2).unwrap();
    assert_eq!(two["count"], 3);
    assert_eq!(two["sylow_order"], 8);
    assert_eq!(two["congruence_ok"], true);
}
