use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dashprov_testkit::fixtures;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dashprov"))
        .args(args)
        .env_remove("DASHPROV_PROFILE")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn fixture(name: &str) -> String {
    fixtures::path(name).to_str().unwrap().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p: PathBuf = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let full = fixture(fixtures::FULL);

    let out = run(&["validate", &full, "--profile", "dashboard-strict"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("warning[R9]"));
    assert!(stdout(&out).contains("0 errors, 1 warning, 0 infos"));
    assert!(stderr(&out).is_empty());

    let strict = run(&["validate", &full, "--profile", "dashboard-strict", "--strict-warnings"]);
    assert_eq!(code(&strict), 1);

    let r1 = fixtures::mutants().into_iter().find(|m| m.rule == 1).unwrap();
    let mutant = write(dir.path(), "r1.ttl", &r1.text);
    let out = run(&["validate", &mutant]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("error[R1]"));

    assert_eq!(code(&run(&["validate", "/no/such/file.ttl"])), 2);
    assert_eq!(code(&run(&["validate", &full, "--profile", "lenient"])), 3);
    assert_eq!(code(&run(&["validate", &full, "--bogus"])), 3);
    assert_eq!(code(&run(&["frobnicate"])), 3);
    assert_eq!(code(&run(&[])), 3);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
}

#[test]
fn parse_errors_print_a_position() {
    let out = run(&["validate", &fixture(fixtures::LISTING_RAW)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 5, column 1"), "{}", stderr(&out));
    assert!(stdout(&out).is_empty());

    let dir = tempfile::tempdir().unwrap();
    let corrupt = write(dir.path(), "bad.provjson", "{\n  \"entity\": {\n    \"ex:a\": [}\n");
    let out = run(&["convert", &corrupt, dir.path().join("out.ttl").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
    assert!(!dir.path().join("out.ttl").exists());
}

#[test]
fn profile_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_dashprov"))
        .args(["validate", &fixture(fixtures::FULL), "--report", "json"])
        .env("DASHPROV_PROFILE", "dashboard-strict")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.as_array().unwrap().len(), 1);
    assert_eq!(report[0]["ruleId"], "R9");
    assert_eq!(report[0]["severity"], "Warning");
}

#[test]
fn format_override_and_unknown_extension() {
    let dir = tempfile::tempdir().unwrap();
    let text = fixtures::read(fixtures::FULL);
    let odd = write(dir.path(), "model.txt", &text);
    assert_eq!(code(&run(&["stats", &odd])), 2);
    let out = run(&["stats", &odd, "--format", "ttl"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("L1=1 L2=4 L3=14"));
}

#[test]
fn convert_round_trips_and_keeps_stats() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("f.provjson");
    let back = dir.path().join("f.ttl");
    let full = fixture(fixtures::FULL);
    assert_eq!(code(&run(&["convert", &full, json.to_str().unwrap()])), 0);
    assert_eq!(code(&run(&["convert", json.to_str().unwrap(), back.to_str().unwrap()])), 0);
    let stats = |p: &str| stdout(&run(&["stats", p, "--report", "json"]));
    assert_eq!(stats(&full), stats(json.to_str().unwrap()));
    assert_eq!(stats(&full), stats(back.to_str().unwrap()));

    let empty = write(dir.path(), "empty.ttl", "@prefix ex: <http://example.org/> .\n");
    let empty_json = dir.path().join("empty.provjson");
    assert_eq!(code(&run(&["convert", &empty, empty_json.to_str().unwrap()])), 0);
    let value: serde_json::Value = serde_json::from_str(&fs::read_to_string(&empty_json).unwrap()).unwrap();
    assert_eq!(value.as_object().unwrap().keys().collect::<Vec<_>>(), ["prefix"]);
    assert_eq!(value["prefix"]["ex"], "http://example.org/");

    let out = run(&["convert", &full, dir.path().join("f.xml").to_str().unwrap()]);
    assert_eq!(code(&out), 3);
}

#[test]
fn queries() {
    let full = fixture(fixtures::FULL);
    let out = run(&["query", "delegation", "ex:CORONAVIRUS-COVID-19", &full, "--report", "json"]);
    assert_eq!(code(&out), 0);
    let chain: Vec<String> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(chain, ["ex:SUS", "ex:Ministério-da-Saúde", "ex:Governo-Federal"]);

    let out = run(&["query", "lineage", "ex:dashboard", &full]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("depth 1: ex:dataset"));

    let out = run(&["query", "freshness", "ex:Casos-novos", &full, "--report", "json"]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["effectiveFreshness"], "2023-03-03T00:00:00Z");

    let listing = fixture(fixtures::LISTING);
    let out = run(&["query", "freshness", ":SUS", &listing]);
    assert_eq!(code(&out), 2, "agents have no freshness");
    let out = run(&["query", "freshness", ":Casos", &listing]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("effective freshness: unknown"));

    let out = run(&["query", "attribution", "ex:dashboard", &full, "--report", "json"]);
    let agents: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(agents.as_array().unwrap().len(), 4);

    assert_eq!(code(&run(&["query", "lineage", "ex:nothing", &full])), 2);
    assert_eq!(code(&run(&["query", "ancestry", "ex:dashboard", &full])), 3);

    let r6 = fixtures::mutants().into_iter().find(|m| m.rule == 6).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cyclic = write(dir.path(), "cyclic.ttl", &r6.text);
    let out = run(&["query", "delegation", "ex:SUS", &cyclic]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("cycle"));
}

#[test]
fn render_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let full = fixture(fixtures::FULL);
    let dot = dir.path().join("g.dot");
    assert_eq!(code(&run(&["render", &full, "--out", dot.to_str().unwrap()])), 0);
    let summary = dashprov_testkit::dot::check(&fs::read_to_string(&dot).unwrap()).unwrap();
    assert_eq!(summary.nodes.len(), 29);

    let html = dir.path().join("r.html");
    assert_eq!(code(&run(&["render", &full, "--out", html.to_str().unwrap(), "--layer", "2"])), 0);
    let text = fs::read_to_string(&html).unwrap();
    assert_eq!(text.matches("<div class=\"entity\"").count(), 4);

    assert_eq!(code(&run(&["render", &full, "--out", dir.path().join("x.pdf").to_str().unwrap()])), 3);
    assert_eq!(code(&run(&["render", &full, "--out", html.to_str().unwrap(), "--layer", "4"])), 3);
    // The listing has no Dashboard entity: a plain graph renders, a layer view cannot.
    let listing = fixture(fixtures::LISTING);
    assert_eq!(code(&run(&["render", &listing, "--out", dot.to_str().unwrap()])), 0);
    let out = run(&["render", &listing, "--out", dot.to_str().unwrap(), "--layer", "1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("Dashboard"));
    assert_eq!(code(&run(&["render", &listing, "--out", html.to_str().unwrap()])), 2);
}

#[test]
fn scaffold_from_outlines() {
    let dir = tempfile::tempdir().unwrap();
    let out_ttl = dir.path().join("s.ttl");
    assert_eq!(code(&run(&["scaffold", &fixture(fixtures::OUTLINE), "--out", out_ttl.to_str().unwrap()])), 0);
    let out = run(&["validate", out_ttl.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("0 errors"));

    let flat = write(dir.path(), "flat.json", r#"{"dashboardName": "Flat", "subtopics": [], "entities": ["a", "b"], "agents": []}"#);
    let flat_out = dir.path().join("flat.provjson");
    assert_eq!(code(&run(&["scaffold", &flat, "--out", flat_out.to_str().unwrap()])), 0);
    let stats = stdout(&run(&["stats", flat_out.to_str().unwrap()]));
    assert!(stats.contains("L1=1 L2=0 L3=2"), "{stats}");
    assert_eq!(code(&run(&["validate", flat_out.to_str().unwrap()])), 0);

    let bad = write(dir.path(), "bad.json", "{\"dashboardName\": \"x\",\n \"colour\": 1}");
    let out = run(&["scaffold", &bad, "--out", dir.path().join("b.ttl").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn stats_and_explain() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.provjson", "{}");
    let out = run(&["stats", &empty, "--report", "json"]);
    assert_eq!(code(&out), 0);
    let stats: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stats["elements"]["total"], 0);
    assert_eq!(stats["relationTotal"], 0);
    assert_eq!(stats["layers"]["l2"], 0);

    let out = run(&["explain", "R10"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("Data-source transparency"));
    assert_eq!(code(&run(&["explain", "R42"])), 2);
}

#[test]
fn inputs_are_never_modified() {
    let full = fixtures::path(fixtures::FULL);
    let before = fs::read(&full).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = full.to_str().unwrap();
    run(&["validate", p]);
    run(&["stats", p]);
    run(&["query", "lineage", "ex:dashboard", p]);
    run(&["render", p, "--out", dir.path().join("a.dot").to_str().unwrap()]);
    run(&["convert", p, dir.path().join("a.provjson").to_str().unwrap()]);
    assert_eq!(fs::read(&full).unwrap(), before);
}
