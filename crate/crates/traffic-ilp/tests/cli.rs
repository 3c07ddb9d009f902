use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_traffic-ilp")).args(args).output().unwrap()
}

fn inputs(out: &Path) -> Vec<String> {
    let f = fixtures();
    let p = |n: &str| f.join(n).to_string_lossy().into_owned();
    vec![
        "--violations".into(),
        p("violations.csv"),
        "--weather".into(),
        p("weather.csv"),
        "--census".into(),
        p("census.csv"),
        "--annotations".into(),
        p("annotations.csv"),
        "--out".into(),
        out.to_string_lossy().into_owned(),
    ]
}

fn run(cmd: &str, extra: &[&str], out: &Path) -> Output {
    let mut args = vec![cmd.to_string()];
    args.extend(inputs(out));
    args.extend(extra.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    bin(&refs)
}

fn ok(o: &Output) {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn category1_hotspots_exceed_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("analyze", &["--scope", "category1"], dir.path());
    ok(&o);
    let text = fs::read_to_string(dir.path().join("analysis/hotspots.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("latitude,longitude,count,label"));
    let counts: Vec<u64> = lines.map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!(!counts.is_empty());
    assert!(counts.iter().all(|&c| c > 10), "{counts:?}");
    assert!(counts.windows(2).all(|w| w[0] >= w[1]));
}

/// Twenty Gaithersburg events on I-270 without a belt; Bethesda negatives
/// share one of the two conditions each, more of them sharing the belt.
fn planted_facts() -> String {
    let mut s = String::new();
    let mut e = 0;
    let mut add = |road: &str, belt: &str, city: &str, s: &mut String| {
        e += 1;
        writeln!(s, "main_road(e{e}, {road}).").unwrap();
        writeln!(s, "driver_characteristics(e{e}, {belt}).").unwrap();
        writeln!(s, "event_time(e{e}, h{}).", e % 24).unwrap();
        writeln!(s, "is_event_in{city}(e{e}).").unwrap();
    };
    for _ in 0..20 {
        add("i270", "belt_no", "gaithersburg", &mut s);
    }
    for _ in 0..6 {
        add("i270", "belt_yes", "bethesda", &mut s);
    }
    for _ in 0..14 {
        add("i495", "belt_no", "bethesda", &mut s);
    }
    s
}

#[test]
fn learns_planted_rule() {
    let dir = tempfile::tempdir().unwrap();
    let facts = dir.path().join("planted.pl");
    fs::write(&facts, planted_facts()).unwrap();
    let out = dir.path().join("out");
    let o = bin(&[
        "learn",
        "--facts",
        facts.to_str().unwrap(),
        "--target",
        "is_event_ingaithersburg",
        "--out",
        out.to_str().unwrap(),
    ]);
    ok(&o);
    let rules = fs::read_to_string(out.join("rules/is_event_ingaithersburg.rules")).unwrap();
    assert_eq!(
        rules,
        "is_event_ingaithersburg(X) :- main_road(X, i270), driver_characteristics(X, belt_no).\n"
    );
    let stats: Value = serde_json::from_str(&fs::read_to_string(out.join("rules/is_event_ingaithersburg.json")).unwrap()).unwrap();
    assert_eq!(stats["positives"], 20);
    assert_eq!(stats["negatives"], 20);
    assert_eq!(stats["clauses"][0]["pos_covered"], 20);
    assert_eq!(stats["clauses"][0]["neg_covered"], 0);
}

fn rule2_facts() -> String {
    let rows = [
        ("i270", "gt_20", "belt_no", "gaithersburg"),
        ("i270", "gt_20", "belt_no", "gaithersburg"),
        ("i495", "gt_20", "belt_no", "gaithersburg"),
        ("i495", "lt_5", "belt_no", "bethesda"),
        ("i270", "lt_5", "belt_no", "bethesda"),
        ("i270", "gt_20", "belt_yes", "bethesda"),
    ];
    let mut s = String::new();
    for (i, (road, occ, belt, city)) in rows.iter().enumerate() {
        let e = i + 1;
        writeln!(s, "main_road(e{e}, {road}).").unwrap();
        writeln!(s, "event_previous_occurrence(e{e}, {occ}).").unwrap();
        writeln!(s, "driver_characteristics(e{e}, {belt}).").unwrap();
        writeln!(s, "is_event_in{city}(e{e}).").unwrap();
    }
    s
}

#[test]
fn eval_builtin_rule2_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let facts = dir.path().join("rule2.pl");
    fs::write(&facts, rule2_facts()).unwrap();
    let out = dir.path().join("out");
    let o = bin(&[
        "eval",
        "--facts",
        facts.to_str().unwrap(),
        "--target",
        "is_event_ingaithersburg",
        "--rules",
        "builtin",
        "--out",
        out.to_str().unwrap(),
    ]);
    ok(&o);
    let report: Value =
        serde_json::from_str(&fs::read_to_string(out.join("eval/is_event_ingaithersburg.builtin.json")).unwrap()).unwrap();
    let m = &report["metrics"];
    assert_eq!(m["true_positives"], 2);
    assert_eq!(m["false_negatives"], 1);
    assert_eq!(m["false_positives"], 0);
    assert_eq!(m["precision"].as_f64(), Some(1.0));
    assert!((m["recall"].as_f64().unwrap() - 0.667).abs() < 5e-4);
}

#[test]
fn input_errors_exit_one_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    let o = bin(&["ingest", "--violations", missing.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");

    assert_eq!(bin(&["ingest"]).status.code(), Some(1));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(bin(&["analyze", "--scope", "bogus"]).status.code(), Some(1));

    let bad = dir.path().join("bad.pl");
    fs::write(&bad, "main_road(e1, i270\n").unwrap();
    let o = bin(&["learn", "--facts", bad.to_str().unwrap(), "--target", "is_event_inx"]);
    assert_eq!(o.status.code(), Some(1));

    let o = bin(&["learn", "--facts", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn strict_mode_aborts_on_bad_row() {
    let dir = tempfile::tempdir().unwrap();
    let src = fs::read_to_string(fixtures().join("violations.csv")).unwrap();
    let mut lines: Vec<&str> = src.lines().collect();
    let broken = lines[5].replacen(",No,", ",Perhaps,", 1);
    lines[5] = &broken;
    let path = dir.path().join("v.csv");
    fs::write(&path, lines.join("\n")).unwrap();
    let out = dir.path().join("out");
    let args = ["ingest", "--violations", path.to_str().unwrap(), "--out", out.to_str().unwrap()];
    ok(&bin(&args));
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("ingest/parse_report.json")).unwrap()).unwrap();
    assert_eq!(report["files"]["violations"]["rejected"], 1);
    assert_eq!(report["files"]["violations"]["rejections"][0]["line"], 6);

    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(bin(&strict).status.code(), Some(1));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixtures();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        format!(
            "violations = {}\nannotations = {}\nout = out\nhotspot_threshold = 40\n",
            f.join("violations.csv").display(),
            f.join("annotations.csv").display()
        ),
    )
    .unwrap();
    let count = |extra: &[&str]| {
        let mut args = vec!["analyze", "--config", cfg.to_str().unwrap()];
        args.extend_from_slice(extra);
        ok(&bin(&args));
        fs::read_to_string(dir.path().join("out/analysis/hotspots.csv")).unwrap().lines().count() - 1
    };
    let from_file = count(&[]);
    let from_flag = count(&["--hotspot-threshold", "10"]);
    assert_eq!(from_file, 1);
    assert!(from_flag > from_file);
}

#[test]
fn stage_by_stage_matches_all() {
    let dir = tempfile::tempdir().unwrap();
    let staged = dir.path().join("staged");
    let whole = dir.path().join("whole");
    for cmd in ["ingest", "analyze", "compile-facts"] {
        ok(&run(cmd, &[], &staged));
    }
    ok(&run("all", &[], &whole));
    for rel in ["facts/facts.pl", "analysis/hotspots.csv", "ingest/violations.csv", "analysis/city_profiles.json"] {
        assert_eq!(fs::read(staged.join(rel)).unwrap(), fs::read(whole.join(rel)).unwrap(), "{rel}");
    }
    let target = "is_event_ingaithersburg";
    ok(&run("learn", &["--target", target], &staged));
    assert_eq!(
        fs::read(staged.join("rules").join(format!("{target}.rules"))).unwrap(),
        fs::read(whole.join("rules").join(format!("{target}.rules"))).unwrap()
    );
    ok(&run("report", &[], &staged));
    let report: Value = serde_json::from_str(&fs::read_to_string(staged.join("report.json")).unwrap()).unwrap();
    assert!(report.get("analysis/night.json").is_some());
    assert!(report.get("rules/is_event_ingaithersburg.json").is_some());
}
