use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::time::Instant;

use tempfile::TempDir;

const FIXTURE_CONFIG: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/small.toml");
const REPORT_FILES: [&str; 7] = [
    "matches.jsonl",
    "participants.csv",
    "verdicts.csv",
    "episodes.csv",
    "scope.csv",
    "coverage.csv",
    "alert_forensics.jsonl",
];

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_trendforge"));
    c.env_remove("TRENDFORGE_WORKERS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A synthetic bundle generated from the fixture config.
fn synth(dir: &Path) -> PathBuf {
    let out = dir.join("synth");
    ok(&["synth", "--config", FIXTURE_CONFIG, "--seed", "3", "--out-dir", s(&out)]);
    out
}

fn report(data: &Path, out_dir: &Path, extra: &[&str]) -> Output {
    let tweets = data.join("tweets.jsonl");
    let banks = data.join("banks");
    let messages = data.join("messages.jsonl");
    let snapshots = data.join("snapshots.jsonl");
    let mut args = vec![
        "report",
        "--tweets",
        s(&tweets),
        "--banks",
        s(&banks),
        "--messages",
        s(&messages),
        "--snapshots",
        s(&snapshots),
        "--out-dir",
        s(out_dir),
    ];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn help_documents_threshold_defaults() {
    for cmd in ["detect", "report"] {
        let help = ok(&[cmd, "--help"]);
        for want in ["[default: 0.20]", "[default: 0.35]", "[default: 500]", "[default: 5]"] {
            assert!(help.contains(want), "{cmd} --help lacks {want}:\n{help}");
        }
    }
    for cmd in ["trends", "report"] {
        let help = ok(&[cmd, "--help"]);
        for want in ["[default: 5000]", "[default: 30]"] {
            assert!(help.contains(want), "{cmd} --help lacks {want}:\n{help}");
        }
    }
    let top = ok(&["--help"]);
    for sub in [
        "ingest",
        "normalize",
        "parse-alerts",
        "match",
        "participants",
        "detect",
        "trends",
        "scope",
        "coverage",
        "synth",
        "report",
    ] {
        assert!(top.contains(sub), "missing subcommand {sub}");
    }
}

#[test]
fn report_bundle_is_complete_fast_and_deterministic() {
    let tmp = TempDir::new().unwrap();
    let data = synth(tmp.path());
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));

    let started = Instant::now();
    let out = report(&data, &a, &[]);
    let elapsed = started.elapsed();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(elapsed.as_secs_f64() < 10.0, "report took {elapsed:?}");

    let out = report(&data, &b, &["--workers", "3"]);
    assert!(out.status.success());
    for f in REPORT_FILES {
        let x = fs::read(a.join(f)).unwrap_or_else(|_| panic!("{f} missing"));
        assert_eq!(x, fs::read(b.join(f)).unwrap(), "{f} differs between runs");
    }

    let verdicts = fs::read_to_string(a.join("verdicts.csv")).unwrap();
    assert!(verdicts.lines().any(|l| l.starts_with("modimeinhaidum,") && l.ends_with("suspicious_conservative")));
    let forensics = fs::read_to_string(a.join("alert_forensics.jsonl")).unwrap();
    assert!(forensics.contains("\"sender_automated\":true"));
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(a.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["coverage_median"], 1.0);
    assert!(summary["tweets"].as_u64().unwrap() >= 10_000);
}

#[test]
fn missing_banks_fails_with_status_1_and_no_outputs() {
    let tmp = TempDir::new().unwrap();
    let data = synth(tmp.path());
    fs::rename(data.join("banks"), data.join("elsewhere")).unwrap();
    let out_dir = tmp.path().join("out");
    let out = report(&data, &out_dir, &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(s(&data.join("banks"))), "{err}");
    assert!(!out_dir.exists());
}

#[test]
fn late_input_error_leaves_no_partial_outputs() {
    let tmp = TempDir::new().unwrap();
    let data = synth(tmp.path());
    fs::write(data.join("snapshots.jsonl"), "{not json}\n").unwrap();
    let out_dir = tmp.path().join("out");
    let out = report(&data, &out_dir, &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":1:"));
    assert!(!out_dir.exists());
}

#[test]
fn strict_mode_names_the_bad_line() {
    let tmp = TempDir::new().unwrap();
    let tweets = tmp.path().join("tweets.jsonl");
    let good = r#"{"tweet_id":"1","author_id":"a","created_at":"2019-03-19T09:00:00+05:30","raw_text":"hello #x"}"#;
    fs::write(&tweets, format!("{good}\n{good}\n")).unwrap();

    let lenient = ok(&["ingest", "--tweets", s(&tweets)]);
    assert!(lenient.contains("\"accepted\": 1"), "{lenient}");

    let out = run(&["ingest", "--tweets", s(&tweets), "--strict"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
}

#[test]
fn invalid_thresholds_and_workers_are_input_errors() {
    let tmp = TempDir::new().unwrap();
    let data = synth(tmp.path());
    let out = report(&data, &tmp.path().join("o"), &["--standard", "1.5"]);
    assert_eq!(out.status.code(), Some(1));

    let out = bin()
        .env("TRENDFORGE_WORKERS", "0")
        .args(["match", "--tweets", s(&data.join("tweets.jsonl")), "--banks", s(&data.join("banks")), "--out"])
        .arg(tmp.path().join("m.jsonl"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn normalize_reads_stdin() {
    let mut child = bin()
        .args(["normalize", "--stdin"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all("Vote for #Change,  NOW! https://t.co/x\n@someone Hello   World\n".as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "vote for now\tvotefornow\nhello world\thelloworld\n"
    );
}

#[test]
fn stepwise_commands_agree_with_report() {
    let tmp = TempDir::new().unwrap();
    let data = synth(tmp.path());
    let t = data.join("tweets.jsonl");
    let banks = data.join("banks");
    let w = tmp.path().join("work");
    let p = |name: &str| w.join(name);

    ok(&["match", "--tweets", s(&t), "--banks", s(&banks), "--out", s(&p("matches.jsonl"))]);
    ok(&[
        "participants",
        "--tweets",
        s(&t),
        "--banks",
        s(&banks),
        "--matches",
        s(&p("matches.jsonl")),
        "--out",
        s(&p("participants.csv")),
        "--records",
        s(&p("participants.jsonl")),
    ]);
    ok(&[
        "detect",
        "--tweets",
        s(&t),
        "--matches",
        s(&p("matches.jsonl")),
        "--out",
        s(&p("verdicts.jsonl")),
        "--csv",
        s(&p("verdicts.csv")),
    ]);
    ok(&["scope", "--tweets", s(&t), "--verdicts", s(&p("verdicts.jsonl")), "--out", s(&p("scope.csv"))]);
    ok(&[
        "coverage",
        "--tweets",
        s(&t),
        "--snapshots",
        s(&data.join("snapshots.jsonl")),
        "--out",
        s(&p("coverage.csv")),
    ]);
    ok(&[
        "trends",
        "--tweets",
        s(&t),
        "--verdicts",
        s(&p("verdicts.jsonl")),
        "--trend-threshold",
        "50",
        "--out-dir",
        s(&p("trends")),
    ]);
    ok(&[
        "parse-alerts",
        "--messages",
        s(&data.join("messages.jsonl")),
        "--out",
        s(&p("alerts.jsonl")),
        "--grammar-report",
        s(&p("grammar.csv")),
    ]);

    let r = tmp.path().join("report");
    assert!(report(&data, &r, &[]).status.success());
    for (step, bundled) in [
        ("matches.jsonl", "matches.jsonl"),
        ("participants.csv", "participants.csv"),
        ("verdicts.csv", "verdicts.csv"),
        ("scope.csv", "scope.csv"),
        ("coverage.csv", "coverage.csv"),
        ("alerts.jsonl", "alert_forensics.jsonl"),
    ] {
        assert_eq!(fs::read(p(step)).unwrap(), fs::read(r.join(bundled)).unwrap(), "{step}");
    }

    let series = fs::read_to_string(p("trends/series/modimeinhaidum.csv")).unwrap();
    assert!(series.starts_with("bin_start,count\n"));
    let episodes = fs::read_to_string(p("trends/episodes.csv")).unwrap();
    assert!(episodes.lines().any(|l| l.starts_with("modimeinhaidum,2019-03-19T09:")), "{episodes}");
    let grammar = fs::read_to_string(p("grammar.csv")).unwrap();
    assert!(grammar.lines().skip(1).all(|l| l.contains(",meridiem,") || l.contains(",dotted_assumed_am,")
        || l.contains(",twenty_four_hour,") || l.contains(",,")));
}

#[test]
fn synth_downsample_reduces_corpus() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("d");
    let stdout = ok(&[
        "synth",
        "--config",
        FIXTURE_CONFIG,
        "--seed",
        "3",
        "--downsample",
        "0.5",
        "--bias-retweets",
        "--out-dir",
        s(&out),
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let (generated, written) = (v["generated_tweets"].as_f64().unwrap(), v["written_tweets"].as_f64().unwrap());
    assert!((written / generated - 0.5).abs() < 0.03, "{written}/{generated}");
    let cov = ok(&[
        "coverage",
        "--tweets",
        s(&out.join("tweets.jsonl")),
        "--snapshots",
        s(&out.join("snapshots.jsonl")),
        "--out",
        s(&tmp.path().join("c.csv")),
    ]);
    let agg: serde_json::Value = serde_json::from_str(&cov).unwrap();
    assert!(agg["median"].as_f64().unwrap() < 0.8);
}
