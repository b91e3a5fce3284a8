use std::path::{Path, PathBuf};

use serde_json::Value;

use monohom::cli::{run, EXIT_CHECK_FAILED, EXIT_INPUT_ERROR, EXIT_OK};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("monohom").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn invoke_json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let (code, out, _) = invoke(&full);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("invalid JSON ({e}): {out}"));
    (code, v)
}

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

#[test]
fn info_reports() {
    let (code, v) = invoke_json(&["info", &path("singleton.poset")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["elements"].as_array().unwrap().len(), 1);
    assert_eq!(v["hasse_edges"].as_array().unwrap().len(), 0);

    let (_, v) = invoke_json(&["info", &path("circle.poset")]);
    assert_eq!(v["hasse_edges"].as_array().unwrap().len(), 4);
    assert_eq!(v["beat_points"].as_array().unwrap().len(), 0);
    assert_eq!(v["minimal"], true);
    assert_eq!(v["core_size"], 4);

    let (_, v) = invoke_json(&["info", &path("bowtie_tail.poset")]);
    let beat: Vec<&str> = v["beat_points"].as_array().unwrap().iter().map(|b| b.as_str().unwrap()).collect();
    assert!(beat.contains(&"t"));
    assert_eq!(v["relations"], 3);
    assert_eq!(v["core_size"], 1);
}

#[test]
fn homology_command() {
    let (code, v) = invoke_json(&["homology", &path("singleton.poset")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["betti"], serde_json::json!([1]));
    let (_, v) = invoke_json(&["homology", &path("circle.poset")]);
    assert_eq!(v["betti"], serde_json::json!([1, 1]));
    assert_eq!(v["hdim"], 1);
    let (_, v) = invoke_json(&["homology", &path("three_chain.poset")]);
    let betti: Vec<u64> = v["betti"].as_array().unwrap().iter().map(|b| b.as_u64().unwrap()).collect();
    assert_eq!(betti.iter().sum::<u64>(), 1);
    assert_eq!(betti[0], 1);
}

#[test]
fn contract_command() {
    let (code, v) = invoke_json(&["contract", &path("two_chain.poset"), "--edge", "1,0"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["result"]["elements"].as_array().unwrap().len(), 1);
    assert_eq!(v["quasi_iso"], true);

    let (_, v) = invoke_json(&["contract", &path("bowtie_tail.poset"), "--edge", "a,b"]);
    assert_eq!(v["quasi_iso"], true);
    assert_eq!(v["cokernel_dims"], serde_json::json!([0, 1, 1]));

    let (_, v) = invoke_json(&["contract", &path("circle.poset"), "--edge", "a,c"]);
    assert_eq!(v["quasi_iso"], false);
    assert_eq!(v["betti"], serde_json::json!([0, 0, 1]));
    assert_eq!(v["whe_criterion"], "not_guaranteed");

    let (code, _, err) = invoke(&["contract", &path("circle.poset"), "--edge", "c,a"]);
    assert_eq!(code, EXIT_INPUT_ERROR);
    assert!(err.contains("not a Hasse edge"));
}

#[test]
fn decompose_and_verify() {
    let args = |cmd: &'static str, cod: &str, map: &str| {
        vec![cmd.to_string(), "--domain".into(), path("circle.poset"), "--codomain".into(), path(cod), "--map".into(), path(map)]
    };
    let a = args("decompose", "point.poset", "circle_to_point.map");
    let (code, v) = invoke_json(&a.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["residuals"].as_array().unwrap().iter().all(|r| r == 0), true);
    assert_eq!(v["steps"].as_array().unwrap().len(), 3);
    assert_eq!(v["source"]["betti"], serde_json::json!([1, 1]));

    let a = args("verify", "point.poset", "circle_to_point.map");
    let (code, v) = invoke_json(&a.iter().map(String::as_str).collect::<Vec<_>>());
    // The composite kernel of circle -> point carries H_1.
    assert_eq!(code, EXIT_CHECK_FAILED);
    let ledger = v["ledger"]["entries"].as_array().unwrap();
    let passed = |name: &str| ledger.iter().find(|e| e["name"] == name).unwrap()["passed"].as_bool().unwrap();
    assert!(passed("step_betti_identity"));
    assert!(passed("betti_sum_formula"));
    assert!(!passed("kernel_acyclic"));

    let a = args("decompose", "two_chain.poset", "circle_to_two_chain.map");
    let (code, v) = invoke_json(&a.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code, EXIT_CHECK_FAILED);
    assert!(v["error"].as_str().unwrap().contains("not monotone"));
}

#[test]
fn bowtie_to_point_verifies() {
    let (code, v) = invoke_json(&[
        "verify",
        "--domain",
        &path("bowtie_tail.poset"),
        "--codomain",
        &path("point.poset"),
        "--map",
        &path("bowtie_tail_to_point.map"),
    ]);
    assert_eq!(code, EXIT_OK, "{v:#}");
    assert_eq!(v["residuals"].as_array().unwrap().iter().all(|r| r == 0), true);
}

#[test]
fn monotone_factorize_gminimal() {
    let map_args = |cmd: &'static str| {
        vec![
            cmd.to_string(),
            "--domain".into(),
            path("circle.poset"),
            "--codomain".into(),
            path("two_chain.poset"),
            "--map".into(),
            path("circle_to_two_chain.map"),
        ]
    };
    let a = map_args("monotone");
    let (code, v) = invoke_json(&a.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["monotone"], false);
    assert_eq!(v["witness"], serde_json::json!(["a", "b"]));

    let a = map_args("factorize");
    let (code, v) = invoke_json(&a.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["steps"].as_array().unwrap().len(), 0);
    assert_eq!(v["z"]["elements"].as_array().unwrap().len(), 4);

    let (code, v) = invoke_json(&["gminimal", &path("circle.poset")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["g_minimal"], true);
    let (_, v) = invoke_json(&["gminimal", &path("two_chain.poset")]);
    assert_eq!(v["g_minimal"], false);
}

#[test]
fn sweep_command() {
    let (code, v) = invoke_json(&["sweep", "--max-n", "4"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["posets_by_size"], serde_json::json!([1, 3, 19, 219]));
    assert_eq!(v["failures"], 0);

    let (code, _, err) = invoke(&["sweep", "--max-n", "7"]);
    assert_eq!(code, EXIT_INPUT_ERROR);
    assert!(err.contains("exceeds the limit"));
    let (code, _, _) = invoke(&["sweep", "--checks", "bogus"]);
    assert_eq!(code, EXIT_INPUT_ERROR);
}

#[test]
fn input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.poset");
    std::fs::write(&bad, "element a\nelement a\n").unwrap();
    let (code, out, err) = invoke(&["--json", "info", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT_ERROR);
    assert!(err.contains("line 2"));
    assert!(serde_json::from_str::<Value>(&out).unwrap()["error"].is_string());

    let cyclic = dir.path().join("cyclic.poset");
    std::fs::write(&cyclic, "rel a < b\nrel b < a\n").unwrap();
    let (code, _, _) = invoke(&["homology", cyclic.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT_ERROR);

    let (code, _, _) = invoke(&["homology", dir.path().join("missing").to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT_ERROR);
    let (code, _, _) = invoke(&["frobnicate"]);
    assert_eq!(code, EXIT_INPUT_ERROR);
}

#[test]
fn text_output() {
    let (code, out, _) = invoke(&["homology", &path("circle.poset")]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("betti   [1, 1]"));
}
