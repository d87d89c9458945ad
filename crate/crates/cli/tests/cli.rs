use std::process::{Command, Output};

use serde_json::Value;

fn cnc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cnc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn machine(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "machine"]);
    let o = cnc(&all);
    let v = serde_json::from_str(&stdout(&o)).expect("one json document");
    (v, o.status.code().expect("exit code"))
}

fn golden(name: &str, args: &[&str]) {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    let expected = std::fs::read_to_string(&path).expect("golden file");
    assert_eq!(stdout(&cnc(args)), expected, "{name}");
}

#[test]
fn golden_reports() {
    golden("bounds_z9.txt", &["bounds", "Z/9", "--chain", "3"]);
    golden(
        "verify_x_cubed.txt",
        &["cnc", "verify", "Z/2[x]/(x^3)", "--chain", "x"],
    );
    golden("info_z12.json", &["info", "Z/12", "--format", "machine"]);
    golden(
        "euler_z4_z9.json",
        &["euler", "Z/4", "2", "Z/9", "3", "--format", "machine"],
    );
    golden("units_z12.txt", &["units", "Z/12"]);
    golden(
        "sample_z9.json",
        &[
            "sample-poly",
            "--p",
            "3",
            "--k",
            "2",
            "--deg",
            "4",
            "--count",
            "500",
            "--seed",
            "11",
            "--format",
            "machine",
        ],
    );
}

#[test]
fn bounds_for_z9() {
    let (v, code) = machine(&["bounds", "Z/9", "--chain", "3"]);
    assert_eq!(code, 0);
    let r = &v["result"];
    for m in ["M1", "M2", "M3"] {
        assert_eq!(r[m], 6);
        assert_eq!(r["verdicts"][m], "verified");
    }
}

#[test]
fn characteristic_failure_exits_one() {
    let (v, code) = machine(&["cnc", "verify", "Z/2[x]/(x^3)", "--chain", "x"]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "verification_failed");
    assert_eq!(v["result"]["failure"]["condition"], "characteristic");
    assert_eq!(v["result"]["failure"]["step"], 1);
    assert_eq!(v["result"]["failure"]["witness_rechecked"], true);

    let (v, code) = machine(&["cnc", "verify", "Z/2[x]/(x^3)", "--chain", "x;x^2"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["nilpotency_indexes"], serde_json::json!([2, 2]));
    assert_eq!(v["result"]["characteristics"], serde_json::json!([2, 2]));
}

#[test]
fn info_for_z12() {
    let (v, code) = machine(&["info", "Z/12"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["unit_count"], 4);
    assert_eq!(v["result"]["ring_order"], 2);
}

#[test]
fn auto_chain_and_matrix_elements() {
    let (v, code) = machine(&["cnc", "auto", "Z/4[u]/(u^2)", "--gen", "2,u"]);
    assert_eq!(code, 0);
    let sizes: Vec<u64> = v["result"]["ideals"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| i["size"].as_u64().unwrap())
        .collect();
    assert_eq!(sizes, vec![8, 2, 1]);

    let (v, code) = machine(&["bounds", "M2(Z/4)", "--chain", "[2,0,0,0]"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["result"]["unit_count"], 96);
    assert_eq!(v["result"]["M2"], 12);
}

#[test]
fn exit_codes_by_category() {
    let o = cnc(&["info", "Z/4["]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("ParseError"));

    let o = cnc(&["cnc", "auto", "Z/12", "--gen", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("NotNilpotent"));

    let o = cnc(&["units", "M3(Z/9)", "--quiet"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("CapExceeded"));

    let o = cnc(&["units", "Z/12", "--cap", "5"]);
    assert_eq!(o.status.code(), Some(3));

    let o = cnc(&["bounds", "GR(2,2,x^2+1)", "--chain", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("ReducibleModulus"));

    let o = cnc(&["bounds", "Z/9", "--chain", "3", "--w-mode", "median"]);
    assert_eq!(o.status.code(), Some(2));

    let o = cnc(&["euler", "Z/4", "2", "Z/9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let runs: &[&[&str]] = &[
        &["units", "Z/9[C2]", "--format", "machine"],
        &[
            "bounds",
            "Z/9[C2]",
            "--chain",
            "3",
            "--w-mode",
            "unit_count",
        ],
        &[
            "sample-poly",
            "--p",
            "2",
            "--k",
            "2",
            "--deg",
            "5",
            "--count",
            "200",
            "--seed",
            "3",
        ],
    ];
    for args in runs {
        assert_eq!(stdout(&cnc(args)), stdout(&cnc(args)), "{args:?}");
    }
}

#[test]
fn machine_format_carries_every_text_field() {
    let args = ["bounds", "Z/9[C2]", "--chain", "3"];
    let text = stdout(&cnc(&args));
    let (v, _) = machine(&args);
    fn keys(v: &Value, out: &mut Vec<String>) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    out.push(k.clone());
                    keys(x, out);
                }
            }
            Value::Array(items) => items.iter().for_each(|x| keys(x, out)),
            _ => {}
        }
    }
    let mut all = Vec::new();
    keys(&v, &mut all);
    for line in text.lines() {
        let label = line.trim_start().trim_start_matches("- ");
        if let Some((key, _)) = label.split_once(':') {
            assert!(
                all.iter().any(|k| k == key),
                "{key} missing from machine output"
            );
        }
    }
}

#[test]
fn unit_lists_are_complete_in_machine_format() {
    let (v, _) = machine(&["units", "M2(Z/4)"]);
    assert_eq!(v["result"]["units"].as_array().unwrap().len(), 96);
    let text = stdout(&cnc(&["units", "M2(Z/4)"]));
    assert!(text.contains("96 units, list elided"));
}

#[test]
fn timing_is_opt_in() {
    let (v, _) = machine(&["info", "Z/12"]);
    assert!(v.get("timing_ms").is_none());
    let (v, _) = machine(&["info", "Z/12", "--timing"]);
    assert!(v["timing_ms"].is_u64());
}
