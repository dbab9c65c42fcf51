use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::thread;

use serde_json::{json, Value};
use tempfile::TempDir;

const NOUNS: &[&str] = &["model", "graph", "retrieval", "corpus", "network", "embedding", "query", "dataset"];
const OTHER: &[&str] = &["the", "we", "propose", "deep", "robust", "in", "on", "fast", "is", "a"];

fn nbr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nbr")).args(args).env_remove("NBR_EMBED_URL").output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = nbr(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn write_corpus(dir: &Path, n: usize) -> PathBuf {
    let mut text = String::new();
    for i in 0..n {
        let w = |j: usize| {
            if (i + j).is_multiple_of(3) {
                NOUNS[(i * 7 + j) % NOUNS.len()]
            } else {
                OTHER[(i * 5 + j) % OTHER.len()]
            }
        };
        let title: Vec<&str> = (0..4).map(|j| NOUNS[(i + j) % NOUNS.len()]).collect();
        let s1: Vec<&str> = (0..9).map(w).collect();
        let s2: Vec<&str> = (9..16).map(w).collect();
        let doc = json!({
            "id": format!("d{i:02}"),
            "title": title.join(" "),
            "abstract": format!("{} . {} .", s1.join(" "), s2.join(" ")),
        });
        text.push_str(&doc.to_string());
        text.push('\n');
    }
    let p = dir.join("corpus.jsonl");
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn perturb_writes_every_variant() {
    let dir = TempDir::new().unwrap();
    let corpus = write_corpus(dir.path(), 5);
    let before = std::fs::read(&corpus).unwrap();
    let out = dir.path().join("v.jsonl");
    ok(&["perturb", "--corpus", s(&corpus), "--codes", "all", "--seed", "7", "--out", s(&out)]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 5 * 34);
    assert_eq!(std::fs::read(&corpus).unwrap(), before);

    ok(&["perturb", "--corpus", s(&corpus), "--codes", "LO-DS", "--out", s(&out)]);
    let codes: Vec<String> = std::fs::read_to_string(&out)
        .unwrap()
        .lines()
        .filter(|l| l.contains("\"d00\""))
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["code"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(codes, ["T", "T+A", "T_ADelNN", "T_ADelNNPH", "TDelNN", "T_ADelNonNNs", "T_ARepADJ"]);
}

#[test]
fn staged_pipeline_produces_task1_report() {
    let dir = TempDir::new().unwrap();
    let corpus = write_corpus(dir.path(), 12);
    let v = dir.path().join("v.jsonl");
    let st = dir.path().join("s.nbrv");
    let rep = dir.path().join("r.json");
    ok(&["perturb", "--corpus", s(&corpus), "--seed", "7", "--out", s(&v)]);
    ok(&["embed", "--variants", s(&v), "--provider", "hash", "--out", s(&st)]);
    ok(&[
        "eval",
        "--task",
        "task1",
        "--store",
        s(&st),
        "--corpus",
        s(&corpus),
        "--norm",
        "l2",
        "--sample",
        "1000",
        "--seed",
        "7",
        "--out",
        s(&rep),
    ]);
    let r = read_json(&rep);
    let rows = r["retrieval"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["task"], "task1");
    assert_eq!(rows[0]["queries"], 12);
    assert_eq!(rows[0]["candidates_per_query"], 12);
    assert_eq!(r["metadata"]["normalization"], "l2");
    assert_eq!(r["metadata"]["model"], "hash-64");
    assert!(r["nn_ret"].as_array().unwrap().is_empty());

    let stdout = ok(&["eval", "--task", "task2", "--store", s(&st), "--corpus", s(&corpus)]).stdout;
    let r2: Value = serde_json::from_slice(&stdout).unwrap();
    assert_eq!(r2["retrieval"][0]["candidates_per_query"], 23);

    let csv_dir = dir.path().join("tables");
    ok(&["report", s(&rep), s(&rep), "--format", "csv", "--out", s(&csv_dir)]);
    let t1 = std::fs::read_to_string(csv_dir.join("task1.csv")).unwrap();
    let lines: Vec<&str> = t1.lines().collect();
    assert_eq!(lines[0], "dataset,model,MRR,T100");
    assert_eq!(lines.len(), 3);
}

#[test]
fn all_is_deterministic_and_rerunnable() {
    let dir = TempDir::new().unwrap();
    let corpus = write_corpus(dir.path(), 20);
    let run = |name: &str| {
        let out = dir.path().join(name);
        ok(&[
            "all",
            "--corpus",
            s(&corpus),
            "--seed",
            "3",
            "--aop-sample",
            "20",
            "--format",
            "json,csv,plotdata",
            "--threads",
            "2",
            "--out",
            s(&out),
        ]);
        out
    };
    let a = run("a");
    let b = run("b");
    let ra = std::fs::read(a.join("report.json")).unwrap();
    assert_eq!(ra, std::fs::read(b.join("report.json")).unwrap());
    for f in ["task1.csv", "nn_ret.csv", "aop_category.csv", "nn_ret_category.dat", "store.nbrv", "variants.jsonl"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let report = read_json(&a.join("report.json"));
    assert_eq!(report["nn_ret"].as_array().unwrap().len(), 32);
    assert_eq!(report["nn_ret_by_category"].as_array().unwrap().len(), 5);
    assert!(report["capability"].is_object());

    let c = dir.path().join("c");
    ok(&["all", "--config", s(&a.join("report.json")), "--out", s(&c)]);
    let rc = read_json(&c.join("report.json"));
    assert_eq!(rc["metadata"]["config_digest"], report["metadata"]["config_digest"]);
    assert_eq!(rc["retrieval"], report["retrieval"]);
    assert_eq!(rc["aop"], report["aop"]);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let corpus = write_corpus(dir.path(), 3);
    assert_eq!(nbr(&["--help"]).status.code(), Some(0));
    assert_eq!(nbr(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(nbr(&["perturb", "--nope"]).status.code(), Some(1));
    assert_eq!(nbr(&["perturb", "--corpus", s(&corpus), "--codes", "T_ADelFoo", "--out", "x"]).status.code(), Some(1));
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"id\":\"a\",\"title\":\"x\"}\n").unwrap();
    assert_eq!(nbr(&["ingest", "--corpus", s(&bad)]).status.code(), Some(1));
    let missing = dir.path().join("missing.nbrv");
    assert_eq!(nbr(&["eval", "--store", s(&missing), "--corpus", s(&corpus)]).status.code(), Some(2));
    let v = dir.path().join("v.jsonl");
    ok(&["perturb", "--corpus", s(&corpus), "--out", s(&v)]);
    let out = nbr(&["embed", "--variants", s(&v), "--provider", "remote", "--out", "s.nbrv"]);
    assert_eq!(out.status.code(), Some(1), "no endpoint is a validation error");
    let out = nbr(&[
        "embed",
        "--variants",
        s(&v),
        "--provider",
        "remote",
        "--embed-url",
        "http://127.0.0.1:9",
        "--out",
        s(&dir.path().join("s.nbrv")),
    ]);
    assert_eq!(out.status.code(), Some(2), "unreachable endpoint is a runtime error");
    assert!(!dir.path().join("s.nbrv").exists());
}

#[test]
fn ingest_reports_stats() {
    let dir = TempDir::new().unwrap();
    let corpus = write_corpus(dir.path(), 4);
    let stats: Value = serde_json::from_slice(&ok(&["ingest", "--corpus", s(&corpus)]).stdout).unwrap();
    assert_eq!(stats["count"], 4);
    assert_eq!(stats["mean_title_len"], 4.0);
    assert_eq!(stats["empty_abstracts"], 0);
}

/// Answers /embed with one-hot vectors keyed on the input position.
fn mock_embed_server() -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    thread::spawn(move || {
        for stream in listener.incoming() {
            let mut stream = stream.unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut len = 0;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line.trim().is_empty() {
                    break;
                }
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
            }
            let mut body = vec![0; len];
            reader.read_exact(&mut body).unwrap();
            let req: Value = serde_json::from_slice(&body).unwrap();
            let vectors: Vec<Value> = req["inputs"]
                .as_array()
                .unwrap()
                .iter()
                .map(|i| {
                    let text = format!("{}{}", i["title"].as_str().unwrap(), i["abstract"].as_str().unwrap());
                    let mut v = vec![0.1f32; 8];
                    v[text.len() % 8] += 1.0;
                    json!({"id": i["id"], "code": i["code"], "vector": v})
                })
                .collect();
            let resp = json!({"model": req["model"], "dim": 8, "vectors": vectors}).to_string();
            let _ = write!(
                stream,
                "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{resp}",
                resp.len()
            );
        }
    });
    format!("http://{addr}")
}

#[test]
fn remote_provider_uses_env_endpoint() {
    let dir = TempDir::new().unwrap();
    let corpus = write_corpus(dir.path(), 3);
    let v = dir.path().join("v.jsonl");
    let st = dir.path().join("s.jsonl");
    ok(&["perturb", "--corpus", s(&corpus), "--codes", "T_ARot", "--out", s(&v)]);
    let out = Command::new(env!("CARGO_BIN_EXE_nbr"))
        .args(["embed", "--variants", s(&v), "--provider", "remote", "--model", "mock", "--out", s(&st)])
        .env("NBR_EMBED_URL", mock_embed_server())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines: Vec<Value> =
        std::fs::read_to_string(&st).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 9);
    assert!(lines.iter().all(|l| l["vector"].as_array().unwrap().len() == 8));
}
