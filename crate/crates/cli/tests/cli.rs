use std::process::Command;

use num_bigint::BigInt;
use proptest::prelude::*;
use serde_json::Value;

use qasdyn_cli::registry::EXAMPLES;
use qasdyn_cli::spec::{parse_map, MapSpec};
use qasdyn_cli::{run, spec_hash};
use qasdyn_core::{Monomial, Polynomial};

fn capture(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut argv = vec!["qasdyn"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn json(args: &[&str]) -> Value {
    let mut argv = args.to_vec();
    argv.extend(["--format", "json"]);
    let (code, out) = capture(&argv);
    assert_eq!(code, 0, "{out}");
    serde_json::from_str(&out).unwrap()
}

fn write_map(dir: &std::path::Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn report_has_the_stable_top_level_keys() {
    let v = json(&["analyze", "--example", "nguyen-ex1", "--horizon", "4"]);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    let mut expect = vec![
        "map", "degrees", "stripped", "h0", "n0", "recurrence", "charpoly", "case", "lambda1", "ratio_check", "qas",
        "timings", "budget",
    ];
    expect.sort_unstable();
    let mut keys = keys;
    keys.sort_unstable();
    assert_eq!(keys, expect);
    assert_eq!(v["degrees"], serde_json::json!([1, 2, 3, 4, 5]));
    assert_eq!(v["lambda1"]["exact"], "1");
    assert!(v["timings"].is_null());
    for key in ["verdict", "witnesses", "assumptions"] {
        assert!(v["qas"].get(key).is_some(), "qas.{key}");
    }
}

#[test]
fn interval_lambda_is_reported_by_its_ends() {
    let v = json(&["recurrence", "1,7,44,273"]);
    assert!(v["lambda1"].get("exact").is_none());
    assert!(v["lambda1"]["lo"].is_string() && v["lambda1"]["hi"].is_string());
    assert_eq!(v["charpoly"]["display"], "s^2 - 7*s + 5");
    assert_eq!(v["case"], "distinct-roots");
}

#[test]
fn empty_horizon_gives_a_single_degree() {
    let v = json(&["analyze", "--example", "monomial-square", "--horizon", "0"]);
    assert_eq!(v["degrees"], serde_json::json!([1]));
    assert_eq!(v["qas"]["verdict"], "inconclusive");
}

#[test]
fn text_table_rows() {
    let (code, out) = capture(&["iterate", "--example", "nguyen-ex3", "--horizon", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("n=2  d=44  stripped_deg=5"), "{out}");
}

#[test]
fn timings_appear_only_on_request() {
    let v = json(&["analyze", "--example", "identity", "--horizon", "3", "--timings"]);
    assert!(v["timings"]["iterate_ms"].is_number());
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        ["analyze", "--example", "bonifant-fornaess-d2m2"],
        ["analyze", "--example", "nguyen-ex1"],
        ["iterate", "--example", "monomial-square"],
    ] {
        for format in ["text", "json"] {
            let mut argv = args.to_vec();
            argv.extend(["--format", format]);
            assert_eq!(capture(&argv), capture(&argv));
        }
    }
}

#[test]
fn out_dir_names_reports_by_content_hash() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, printed) = capture(&["analyze", "--example", "nguyen-ex1", "--horizon", "5", "--format", "json", "--out", d]);
    assert_eq!(code, 0);
    let mut spec = qasdyn_cli::registry::load("nguyen-ex1").unwrap();
    spec.limits.horizon = 5;
    let name = format!("{}-analyze.json", spec_hash(&spec));
    let path = dir.path().join(&name);
    assert_eq!(printed.trim(), path.to_str().unwrap());
    let (_, stdout) = capture(&["analyze", "--example", "nguyen-ex1", "--horizon", "5", "--format", "json"]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["map"]["spec_hash"], spec_hash(&spec));
}

#[test]
fn map_files_and_examples_hash_alike() {
    let dir = tempfile::tempdir().unwrap();
    let (_, doc) = capture(&["examples", "monomial-square"]);
    let path = write_map(dir.path(), "m.toml", &doc);
    let from_file = json(&["analyze", "--map", &path]);
    let from_key = json(&["analyze", "--example", "monomial-square"]);
    assert_eq!(from_file, from_key);
}

#[test]
fn parse_errors_exit_2_with_a_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_map(
        dir.path(),
        "bad.toml",
        "variables = [\"z\", \"w\", \"t\"]\ncomponents = [\"z^2\", \"w^2\", \"t^2 z\"]\n",
    );
    let bin = env!("CARGO_BIN_EXE_qasdyn");
    let out = Command::new(bin).args(["analyze", "--map", &path]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("components[2]: line 1, column 5"), "{err}");
    assert!(err.contains("implicit multiplication"), "{err}");
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("inhomogeneous", "\"z^2 + w\", \"w^2\", \"t^2\""),
        ("degenerate", "\"z*w\", \"z*w\", \"t^2\""),
        ("short", "\"z^2\", \"w^2\""),
    ] {
        let path = write_map(
            dir.path(),
            &format!("{name}.toml"),
            &format!("variables = [\"z\", \"w\", \"t\"]\ncomponents = [{body}]\n"),
        );
        assert_eq!(capture(&["analyze", "--map", &path]).0, 2, "{name}");
    }
    assert_eq!(capture(&["analyze", "--example", "no-such-map"]).0, 2);
    assert_eq!(capture(&["analyze", "--map", "/nonexistent/map.toml"]).0, 2);
    assert_eq!(capture(&["analyze"]).0, 2);
    assert_eq!(capture(&["recurrence", "1,x,3"]).0, 2);
}

#[test]
fn budget_exhaustion_before_a_verdict_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_map(
        dir.path(),
        "tight.toml",
        "variables = [\"z\", \"w\", \"t\"]\ncomponents = [\"z^2\", \"w^2\", \"t^2\"]\n[limits]\nmax_degree = 16\n",
    );
    let (code, out) = capture(&["iterate", "--map", &path, "--format", "json"]);
    assert_eq!(code, 3);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["budget"]["stopped"], "budget");
    assert_eq!(v["degrees"], serde_json::json!([1, 2, 4, 8, 16]));
    assert_eq!(capture(&["analyze", "--map", &path]).0, 3);
}

#[test]
fn budget_stop_after_a_drop_is_not_exhaustion() {
    let dir = tempfile::tempdir().unwrap();
    let (_, doc) = capture(&["examples", "nguyen-ex1"]);
    let doc = doc.replace("horizon = 12", "horizon = 12\nmax_degree = 6");
    let path = write_map(dir.path(), "ex1.toml", &doc);
    let (code, out) = capture(&["analyze", "--map", &path, "--format", "json"]);
    assert_eq!(code, 0, "{out}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["budget"]["stopped"], "budget");
    assert_eq!(v["n0"], 1);
}

#[test]
fn examples_verb_lists_the_registry() {
    let (code, out) = capture(&["examples"]);
    assert_eq!(code, 0);
    for e in EXAMPLES {
        assert!(out.lines().any(|l| l.starts_with(e.key)), "{}", e.key);
    }
    let v = json(&["examples", "bonifant-fornaess-d2m2"]);
    assert_eq!(v["components"][1], "-t^2");
}

#[test]
fn recurrence_verb_reports_shape_and_mismatch() {
    let v = json(&["recurrence", "1", "2", "3", "4", "5", "6"]);
    assert_eq!(v["recurrence"]["coefficients"], serde_json::json!(["1", "-2", "1"]));
    assert_eq!(v["case"], "double-root");
    let v = json(&["recurrence", "1,1,2,3,5,8,13,21"]);
    assert!(v["charpoly"].is_null());
    assert!(v["diagnostic"].as_str().unwrap().contains("not of QAS shape"));
    let v = json(&["recurrence", "1,2,5"]);
    assert!(v["recurrence"].is_null());
}

fn homogeneous(deg: u32) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((0..=deg, 0..=deg, -5i64..=5), 1..=4).prop_map(move |terms| {
        Polynomial::from_terms(
            3,
            terms.into_iter().filter(|(a, b, _)| a + b <= deg).map(|(a, b, c)| {
                (Monomial::new(vec![a, b, deg - a - b]), BigInt::from(c))
            }),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn emit_then_parse_is_lossless(
        comps in (1u32..=3).prop_flat_map(|deg| prop::collection::vec(homogeneous(deg), 3)),
        horizon in 0usize..=20,
    ) {
        prop_assume!(comps.iter().all(|p| !p.is_zero()));
        let vars: Vec<String> = ["z", "w", "t"].iter().map(|s| s.to_string()).collect();
        let spec = MapSpec {
            variables: vars.clone(),
            components: comps.iter().map(|p| p.display_with(&vars).to_string()).collect(),
            tolerance: "1e-12".into(),
            hints: Default::default(),
            limits: qasdyn_cli::spec::Limits { horizon, ..Default::default() },
        };
        let Ok(parsed) = parse_map(&spec) else {
            // degenerate draws are rejected before emission matters
            return Ok(());
        };
        // canonical maps: emit the normalized lifting, parse it back
        let canonical = MapSpec {
            components: parsed.map.components().iter().map(|p| p.display_with(&vars).to_string()).collect(),
            ..spec
        };
        let text = canonical.to_toml();
        let back = MapSpec::from_toml(&text).unwrap();
        prop_assert_eq!(&back, &canonical);
        let again = parse_map(&back).unwrap();
        prop_assert_eq!(again.map, parsed.map);
        prop_assert_eq!(back.to_toml(), text);
    }
}
