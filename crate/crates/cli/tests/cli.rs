use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use huffguard::features::wav::encode_pcm16;
use serde_json::Value;
use tempfile::TempDir;

fn huffguard(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_huffguard"))
        .args(args)
        .env_remove("HUFFGUARD_CONFIG")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = huffguard(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Exit status and the parsed one-line error of a failing run.
fn err(args: &[&str]) -> (i32, Value) {
    let out = huffguard(args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(
        stderr.lines().count(),
        1,
        "diagnostic is not one line: {stderr}"
    );
    let v: Value = serde_json::from_str(stderr.trim()).expect("diagnostic is JSON");
    assert!(v["error"].is_string() && v["message"].is_string());
    (out.status.code().unwrap(), v)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn lines(p: &Path) -> Vec<String> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .map(String::from)
        .collect()
}

fn records(p: &Path) -> Vec<Value> {
    lines(p)
        .iter()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

/// A few seconds of alternating tones with a noise burst, as 16-bit WAV.
fn scene_wav(path: &Path, seconds: f64) {
    let rate = 8000u32;
    let n = (seconds * rate as f64) as usize;
    let mut state = 12345u64;
    let samples: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / rate as f64;
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let noise = ((state >> 33) as f64 / (1u64 << 31) as f64) - 0.5;
            let tone = if (t as usize).is_multiple_of(2) {
                440.0
            } else {
                1250.0
            };
            let burst = if (6.0..7.0).contains(&t) {
                0.6 * noise
            } else {
                0.02 * noise
            };
            0.3 * (2.0 * std::f64::consts::PI * tone * t).sin() + burst
        })
        .collect();
    fs::write(path, encode_pcm16(&samples, rate)).unwrap();
}

struct Synth {
    dir: TempDir,
    features: PathBuf,
    labels: PathBuf,
}

fn synth(extra: &[&str]) -> Synth {
    let dir = tempfile::tempdir().unwrap();
    let features = dir.path().join("f.csv");
    let labels = dir.path().join("l.csv");
    let mut args = vec!["synth", "--features", s(&features), "--labels", s(&labels)];
    args.extend_from_slice(extra);
    ok(&args);
    Synth {
        dir,
        features,
        labels,
    }
}

fn detect(input: &Path, out: &Path, extra: &[&str]) {
    let mut args = vec!["detect", "--input", s(input), "--out", s(out)];
    args.extend_from_slice(extra);
    ok(&args);
}

fn output_bytes(dir: &Path) -> Vec<Vec<u8>> {
    ["frames.jsonl", "events.jsonl", "nodes.csv"]
        .iter()
        .map(|f| fs::read(dir.join(f)).unwrap())
        .collect()
}

#[test]
fn synth_is_deterministic_per_seed() {
    let a = synth(&["--seed", "42"]);
    let b = synth(&["--seed", "42"]);
    let c = synth(&["--seed", "43"]);
    assert_eq!(
        fs::read(&a.features).unwrap(),
        fs::read(&b.features).unwrap()
    );
    assert_eq!(fs::read(&a.labels).unwrap(), fs::read(&b.labels).unwrap());
    assert_ne!(
        fs::read(&a.features).unwrap(),
        fs::read(&c.features).unwrap()
    );
}

#[test]
fn synth_labels_cover_the_requested_fraction() {
    let run = synth(&["--frames", "4000", "--anomaly-fraction", "0.02"]);
    let labels = lines(&run.labels);
    assert_eq!(labels[0], "start_s,end_s,label");
    let labeled: f64 = labels[1..]
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f[2], "anomaly");
            f[1].parse::<f64>().unwrap() - f[0].parse::<f64>().unwrap()
        })
        .sum();
    let total = 4000.0 * 0.5;
    // One 8-frame burst is 4 s.
    assert!(
        (labeled / total - 0.02).abs() <= 4.0 / total,
        "fraction {}",
        labeled / total
    );
    let header = &lines(&run.features)[0];
    let expected: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=15).map(|i| format!("f{i}")))
        .collect();
    assert_eq!(header, &expected.join(","));
}

#[test]
fn synth_rejects_empty_specs() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.csv");
    let l = dir.path().join("l.csv");
    for flags in [["--frames", "0"], ["--clusters", "0"]] {
        let mut args = vec!["synth", "--features", s(&f), "--labels", s(&l)];
        args.extend_from_slice(&flags);
        let (code, v) = err(&args);
        assert_eq!(code, 1);
        assert_eq!(v["error"], "invalid_parameter");
        assert!(!f.exists(), "no partial output");
    }
}

#[test]
fn detect_on_wav_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let wav = dir.path().join("scene.wav");
    scene_wav(&wav, 12.0);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    detect(&wav, &a, &[]);
    detect(&wav, &b, &[]);
    assert_eq!(output_bytes(&a), output_bytes(&b));
    let frames = records(&a.join("frames.jsonl"));
    assert_eq!(frames.len(), 24);
    assert_eq!(frames[3]["time_s"], 1.5);
    // 8-frame events every 4 frames over 24 frames.
    assert_eq!(records(&a.join("events.jsonl")).len(), 5);
}

#[test]
fn frame_records_have_the_documented_fields() {
    let run = synth(&["--frames", "200"]);
    let out = run.dir.path().join("o");
    detect(&run.features, &out, &[]);
    let frames = records(&out.join("frames.jsonl"));
    assert_eq!(frames.len(), 200);
    for (i, f) in frames.iter().enumerate() {
        let keys: Vec<&str> = f.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys.len(), 7);
        for k in [
            "t",
            "time_s",
            "score",
            "matched_id",
            "miss",
            "nodes",
            "merged",
        ] {
            assert!(keys.contains(&k), "missing {k}");
        }
        assert_eq!(f["t"], i as u64 + 1);
        let score = f["score"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&score));
    }
    let nodes = lines(&out.join("nodes.csv"));
    assert_eq!(nodes[0], "t,node_count");
    assert_eq!(nodes.len(), 201);
    assert_eq!(nodes[200], format!("200,{}", frames[199]["nodes"]));
    for e in records(&out.join("events.jsonl")) {
        assert_eq!(e.as_object().unwrap().len(), 2);
        assert!(e["event_start_s"].is_f64() && e["omega"].is_f64());
    }
}

#[test]
fn baselines_report_replacements() {
    let run = synth(&["--frames", "600"]);
    for mode in ["fixed-tree", "agmm"] {
        let out = run.dir.path().join(mode);
        detect(
            &run.features,
            &out,
            &["--mode", mode, "--normalize", "false"],
        );
        let frames = records(&out.join("frames.jsonl"));
        assert_eq!(frames.len(), 600);
        let mut last = 0;
        for f in &frames {
            let r = f["replaced"].as_u64().expect("replaced counter");
            assert!(r >= last);
            last = r;
            assert_eq!(f["merged"], 0);
        }
    }
}

#[test]
fn empty_input_yields_empty_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let wav = dir.path().join("short.wav");
    // 0.2 s is shorter than one 0.5 s frame.
    scene_wav(&wav, 0.2);
    let out = dir.path().join("o");
    detect(&wav, &out, &[]);
    assert!(lines(&out.join("frames.jsonl")).is_empty());
    assert!(lines(&out.join("events.jsonl")).is_empty());
    assert_eq!(lines(&out.join("nodes.csv")), vec!["t,node_count"]);

    let csv = dir.path().join("empty.csv");
    fs::write(&csv, "t,f1,f2\n").unwrap();
    let out = dir.path().join("p");
    detect(&csv, &out, &["--mode", "agmm"]);
    assert!(lines(&out.join("frames.jsonl")).is_empty());
}

#[test]
fn stationary_stream_settles() {
    let run = synth(&[
        "--frames",
        "4000",
        "--anomaly-fraction",
        "0",
        "--clusters",
        "5",
    ]);
    let out = run.dir.path().join("o");
    detect(&run.features, &out, &["--normalize", "false"]);
    let counts: Vec<usize> = lines(&out.join("nodes.csv"))[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let data = |nodes: usize| (nodes - 1) / 2;
    let last = *counts.last().unwrap();
    assert!(data(last) <= 13, "{} data nodes", data(last));
    assert!(counts[2000..].iter().all(|&c| c == last));
}

#[test]
fn limit_fraction_truncates_the_stream() {
    let run = synth(&["--frames", "100"]);
    let out = run.dir.path().join("o");
    detect(&run.features, &out, &["--limit-fraction", "0.67"]);
    assert_eq!(records(&out.join("frames.jsonl")).len(), 67);
}

/// Pairwise statistic: P(pos > neg) + P(tie) / 2.
fn pairwise_auc(scores: &[(f64, bool)]) -> f64 {
    let pos: Vec<f64> = scores.iter().filter(|s| s.1).map(|s| s.0).collect();
    let neg: Vec<f64> = scores.iter().filter(|s| !s.1).map(|s| s.0).collect();
    let mut total = 0.0;
    for p in &pos {
        for n in &neg {
            total += if p > n {
                1.0
            } else if p == n {
                0.5
            } else {
                0.0
            };
        }
    }
    total / (pos.len() * neg.len()) as f64
}

/// 100 events, 4 s long, every 2 s; labels cover whole events so the
/// overlap rule is unambiguous.
fn eval_fixture(dir: &Path, seed: u64) -> (PathBuf, PathBuf, PathBuf, Vec<(f64, bool)>) {
    let mut state = seed;
    let mut next = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut events = String::new();
    let mut labels = String::from("start_s,end_s,label\n");
    let mut complement = String::from("start_s,end_s,label\n");
    let mut truth = Vec::new();
    for i in 0..100 {
        let start = 4.0 * i as f64;
        let positive = next() < 0.3;
        // Coarse scores so ties occur.
        let omega = ((next() + if positive { 0.3 } else { 0.0 }) * 10.0).round() / 10.0;
        events.push_str(&format!(
            "{{\"event_start_s\":{start:?},\"omega\":{omega:?}}}\n"
        ));
        let row = format!("{start},{},anomaly\n", start + 4.0);
        if positive {
            labels.push_str(&row);
        } else {
            complement.push_str(&row);
        }
        truth.push((omega, positive));
    }
    let e = dir.join("events.jsonl");
    let l = dir.join("labels.csv");
    let c = dir.join("complement.csv");
    fs::write(&e, events).unwrap();
    fs::write(&l, labels).unwrap();
    fs::write(&c, complement).unwrap();
    (e, l, c, truth)
}

fn eval_json(events: &Path, labels: &Path) -> Value {
    let out = ok(&[
        "eval",
        "--scores",
        s(events),
        "--labels",
        s(labels),
        "--event-step",
        "4",
    ]);
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn eval_matches_the_pairwise_statistic_and_label_swap() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 1..6 {
        let (events, labels, complement, truth) = eval_fixture(dir.path(), seed);
        let v = eval_json(&events, &labels);
        let a = v["auc"].as_f64().unwrap();
        assert!((a - pairwise_auc(&truth)).abs() < 1e-9);
        let swapped = eval_json(&events, &complement)["auc"].as_f64().unwrap();
        assert!((a + swapped - 1.0).abs() < 1e-9);
        let points = v["points"].as_array().unwrap();
        assert_eq!(points.first().unwrap(), &serde_json::json!([0.0, 0.0]));
        assert_eq!(points.last().unwrap(), &serde_json::json!([1.0, 1.0]));
    }
}

#[test]
fn eval_of_a_perfect_ranking_is_one_and_can_write_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let events = dir.path().join("e.jsonl");
    let labels = dir.path().join("l.csv");
    fs::write(
        &events,
        "{\"event_start_s\":0.0,\"omega\":0.2}\n{\"event_start_s\":10.0,\"omega\":0.9}\n{\"event_start_s\":20.0,\"omega\":0.3}\n",
    )
    .unwrap();
    fs::write(&labels, "start_s,end_s,label\n10,14,anomaly\n").unwrap();
    let out = dir.path().join("auc.json");
    ok(&[
        "eval",
        "--scores",
        s(&events),
        "--labels",
        s(&labels),
        "--out",
        s(&out),
    ]);
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["auc"], 1.0);
}

#[test]
fn eval_on_one_class_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let events = dir.path().join("e.jsonl");
    let labels = dir.path().join("l.csv");
    fs::write(&events, "{\"event_start_s\":0.0,\"omega\":0.2}\n").unwrap();
    fs::write(&labels, "start_s,end_s,label\n").unwrap();
    let (code, v) = err(&["eval", "--scores", s(&events), "--labels", s(&labels)]);
    assert_eq!(code, 1);
    assert_eq!(v["error"], "missing_class");
    assert!(v["message"].as_str().unwrap().contains("anomaly"));
}

#[test]
fn synthetic_pipeline_detects_planted_anomalies() {
    let run = synth(&[]);
    let out = run.dir.path().join("o");
    detect(&run.features, &out, &["--normalize", "false"]);
    let v = eval_json_default(&out.join("events.jsonl"), &run.labels);
    assert!(v["auc"].as_f64().unwrap() > 0.9, "{v}");
}

fn eval_json_default(events: &Path, labels: &Path) -> Value {
    let out = ok(&["eval", "--scores", s(events), "--labels", s(labels)]);
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn config_file_env_var_and_flag_precedence() {
    let run = synth(&["--frames", "300"]);
    let dir = run.dir.path();
    let cfg = dir.join("run.conf");
    fs::write(&cfg, "# tuned\ntheta-cos = 0.5\nnormalize=false\n").unwrap();

    let plain = dir.join("plain");
    let via_flag = dir.join("via_flag");
    let via_env = dir.join("via_env");
    let overridden = dir.join("overridden");
    let explicit = dir.join("explicit");
    detect(&run.features, &plain, &[]);
    detect(&run.features, &via_flag, &["--config", s(&cfg)]);
    let out = Command::new(env!("CARGO_BIN_EXE_huffguard"))
        .args(["detect", "--input", s(&run.features), "--out", s(&via_env)])
        .env("HUFFGUARD_CONFIG", &cfg)
        .output()
        .unwrap();
    assert!(out.status.success());
    detect(
        &run.features,
        &overridden,
        &[
            "--config",
            s(&cfg),
            "--theta-cos",
            "0.93",
            "--normalize",
            "true",
        ],
    );
    detect(
        &run.features,
        &explicit,
        &["--theta-cos", "0.5", "--normalize", "false"],
    );

    assert_ne!(output_bytes(&plain), output_bytes(&via_flag));
    assert_eq!(output_bytes(&via_flag), output_bytes(&via_env));
    assert_eq!(output_bytes(&via_flag), output_bytes(&explicit));
    assert_eq!(output_bytes(&overridden), output_bytes(&plain));
}

#[test]
fn failures_are_single_line_json() {
    let run = synth(&["--frames", "50"]);
    let dir = run.dir.path();
    let out = dir.join("o");
    let f = s(&run.features);
    let o = s(&out);

    let (code, v) = err(&["detect", "--input", "/definitely/missing.csv", "--out", o]);
    assert_eq!((code, v["error"].as_str().unwrap()), (1, "io"));

    let (code, v) = err(&["detect", "--input", f, "--out", o, "--alpha", "2"]);
    assert_eq!(
        (code, v["error"].as_str().unwrap()),
        (1, "invalid_parameter")
    );

    let (code, v) = err(&[
        "detect",
        "--input",
        f,
        "--out",
        o,
        "--event-duration",
        "4.2",
    ]);
    assert_eq!(
        (code, v["error"].as_str().unwrap()),
        (1, "invalid_parameter")
    );

    let bad_cfg = dir.join("bad.conf");
    fs::write(&bad_cfg, "alpha=0.1\nmystery=3\n").unwrap();
    let (code, v) = err(&["detect", "--input", f, "--out", o, "--config", s(&bad_cfg)]);
    assert_eq!((code, v["error"].as_str().unwrap()), (1, "config"));
    assert!(v["message"].as_str().unwrap().contains("line 2"));

    let garbage = dir.join("garbage.wav");
    fs::write(&garbage, b"RIFF nonsense").unwrap();
    let (code, v) = err(&["detect", "--input", s(&garbage), "--out", o]);
    assert_eq!((code, v["error"].as_str().unwrap()), (1, "audio_parse"));

    let csv = dir.join("ragged.csv");
    fs::write(&csv, "t,f1,f2\n0,1,2\n0.5,1\n").unwrap();
    let (code, v) = err(&["detect", "--input", s(&csv), "--out", o]);
    assert_eq!((code, v["error"].as_str().unwrap()), (1, "parse"));

    let (code, v) = err(&["detect", "--input", f]);
    assert_eq!((code, v["error"].as_str().unwrap()), (2, "usage"));

    let (code, _) = err(&[]);
    assert_eq!(code, 2);

    assert!(!out.exists(), "failed runs leave no output behind");
}

#[test]
fn dump_tree_prints_the_snapshot_format() {
    let run = synth(&["--frames", "300"]);
    let a = ok(&[
        "dump-tree",
        "--input",
        s(&run.features),
        "--normalize",
        "false",
    ])
    .stdout;
    let b = ok(&[
        "dump-tree",
        "--input",
        s(&run.features),
        "--normalize",
        "false",
    ])
    .stdout;
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(' ').collect()).collect();
    assert!(rows.len() >= 3 && rows.len() % 2 == 1);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r.len(), 5);
        assert_eq!(r[0].parse::<usize>().unwrap(), i + 1);
        assert!(["root", "internal", "data", "nyt"].contains(&r[1]));
        r[2].parse::<f64>().unwrap();
    }
    assert_eq!(rows[0][1], "root");
    assert_eq!(rows.iter().filter(|r| r[1] == "nyt").count(), 1);

    let to_file = run.dir.path().join("tree.txt");
    ok(&[
        "dump-tree",
        "--input",
        s(&run.features),
        "--normalize",
        "false",
        "--out",
        s(&to_file),
    ]);
    assert_eq!(fs::read_to_string(&to_file).unwrap(), text);
}
