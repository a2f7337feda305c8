use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let argv = std::iter::once("dsseq").chain(args.iter().copied());
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = dsseq_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = run(args);
    let json = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{args:?}: {e}\nstdout: {out}\nstderr: {err}"));
    (code, json)
}

#[test]
fn z1_of_three() {
    let (code, json) = run_json(&["generate", "z", "--d", "1", "--m", "3"]);
    assert_eq!(code, 0);
    let blocks: Vec<Vec<u64>> = serde_json::from_value(json["sequence"]["blocks"].clone()).unwrap();
    assert_eq!(blocks, vec![vec![0, 1, 2], vec![2, 1, 0], vec![0, 1, 2]]);
    assert_eq!(json["sequence"]["special"], serde_json::json!([0, 2]));
    assert_eq!(json["seed"], 0);

    let (code, text, _) = run(&["generate", "z", "--d", "1", "--m", "3", "--text"]);
    assert_eq!(code, 0);
    assert_eq!(text.trim(), "[0 1 2] | (2 1 0) | [0 1 2]");
}

#[test]
fn ackermann_at_four() {
    let (code, json) = run_json(&["ackermann", "eval", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(json["value"], "65536");
}

#[test]
fn generated_sequences_verify() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[(&[&str], &str)] = &[
        (&["z", "--d", "1", "--m", "4"], "construction,ds3,multiplicity=3"),
        (&["z", "--d", "2", "--m", "2"], "construction,ds3,multiplicity=5"),
        (
            &["z", "--d", "2", "--m", "3"],
            "construction,ds3,multiplicity=5,blocks-distinct",
        ),
        (&["even", "--s", "4", "--k", "2", "--m", "2"], "construction,ds4"),
        (&["even", "--s", "6", "--k", "2", "--m", "2"], "construction,ds6"),
        (&["interpolated", "--n", "20"], "construction,ds3"),
        (&["aff", "--r", "3", "--m", "4"], "construction,formation-free=3:2"),
    ];
    for (i, (gen, props)) in cases.iter().enumerate() {
        let mut args = vec!["generate"];
        args.extend_from_slice(gen);
        let (code, out, err) = run(&args);
        assert_eq!(code, 0, "{gen:?}: {err}");
        let path = dir.path().join(format!("seq{i}.json"));
        std::fs::write(&path, out).unwrap();
        let (code, json) = run_json(&["verify", "--file", path.to_str().unwrap(), "--props", props]);
        assert_eq!(code, 0, "{gen:?} failed {props}: {json}");
        assert_eq!(json["pass"], true);
    }
}

#[test]
fn failing_property_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z.json");
    let (_, out, _) = run(&["generate", "z", "--d", "2", "--m", "3"]);
    std::fs::write(&path, out).unwrap();
    let (code, json) = run_json(&[
        "verify",
        "--file",
        path.to_str().unwrap(),
        "--props",
        "ds2,construction",
    ]);
    assert_eq!(code, 1);
    let props = json["props"].as_array().unwrap();
    assert_eq!(props[0]["pass"], false);
    assert_eq!(props[1]["pass"], true);
}

#[test]
fn bare_sequence_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bare.json");
    std::fs::write(&path, r#"{"blocks": [[0, 1], [1, 0], [0]], "special": []}"#).unwrap();
    let (code, _) = run_json(&["verify", "--file", path.to_str().unwrap(), "--props", "ds1"]);
    assert_eq!(code, 1);
    let (code, _) = run_json(&[
        "verify",
        "--file",
        path.to_str().unwrap(),
        "--props",
        "ds2,blocks-distinct",
    ]);
    assert_eq!(code, 0);
    let (code, _) = run_json(&["verify", "--file", path.to_str().unwrap(), "--props", "sparse=2"]);
    assert_eq!(code, 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["generate", "z", "--d", "1"]).0, 2);
    assert_eq!(run(&["verify", "--file", "/nonexistent/seq.json"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn budget_exhaustion_exits_three() {
    let (code, out, _) = run(&["stats", "z", "--d", "4", "--m", "4"]);
    assert_eq!(code, 3);
    let json: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["seed"], 0);

    let (code, json) = run_json(&["--max-nodes", "1000", "oracle", "lambda", "--s", "3", "--n", "6"]);
    assert_eq!(code, 3);
    assert_eq!(json["exact"], false);
}

#[test]
fn seed_is_echoed() {
    let (code, json) = run_json(&["--seed", "17", "oracle", "lambda", "--s", "2", "--n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(json["seed"], 17);
    assert_eq!(json["value"], 5);
}

#[test]
fn oracle_cache_reuses_records() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let cache = cache.to_str().unwrap();
    let first = run(&["--cache", cache, "oracle", "psi", "--s", "3", "--m", "4", "--n", "3"]);
    let second = run(&["--cache", cache, "oracle", "psi", "--s", "3", "--m", "4", "--n", "3"]);
    assert_eq!(first.0, 0);
    assert_eq!(first.1, second.1);
    assert!(std::fs::metadata(cache).unwrap().len() > 0);
}

#[test]
fn formation_check_reports_windows() {
    let (code, json) = run_json(&["formations", "check", "--seq", "0 1 1 0 0 1", "--r", "2", "--s", "3"]);
    assert_eq!(code, 0);
    assert_eq!(json["contains"], true);
}
