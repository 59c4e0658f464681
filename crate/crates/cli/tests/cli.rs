use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};

const BIN: &str = env!("CARGO_BIN_EXE_ontodomain");
const LABOUR_QUERY: &str =
    "PREFIX Politics: <http://www.semanticweb.org/ontologies/Politics.owl#>\nSELECT *\nWHERE { Politics: labour ?b ?c}";

fn scratch(tag: &str) -> PathBuf {
    static N: AtomicUsize = AtomicUsize::new(0);
    let dir = std::env::temp_dir().join(format!("ontodomain-{}-{tag}-{}", std::process::id(), N.fetch_add(1, Ordering::SeqCst)));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn pipeline_is_byte_identical_across_runs() {
    let a = scratch("det-a");
    let b = scratch("det-b");
    ok(&["pipeline", "--bundled", "--out", path(&a)]);
    ok(&["pipeline", "--bundled", "--out", path(&b)]);
    let (fa, fb) = (files(&a), files(&b));
    assert!(fa.len() >= 8);
    assert_eq!(fa, fb);
}

#[test]
fn pipeline_dump_carries_campaign_domains() {
    let dir = scratch("dump");
    ok(&["pipeline", "--bundled", "--out", path(&dir)]);
    let dump = fs::read_to_string(dir.join("annotated.jsonl")).unwrap();
    let line = dump.lines().find(|l| l.contains("\"id\":\"kanis\"")).unwrap();
    let v: serde_json::Value = serde_json::from_str(line).unwrap();
    assert_eq!(v["domains"], serde_json::json!(["travel", "society", "politics"]));
}

#[test]
fn query_returns_labour_rows() {
    let dir = scratch("query");
    ok(&["pipeline", "--bundled", "--out", path(&dir)]);
    let out = ok(&["query", "--out", path(&dir), LABOUR_QUERY]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 8);
    assert!(text.lines().all(|l| l.starts_with("http://www.semanticweb.org/ontologies/Politics.owl#labour\t")));
    assert!(text.contains("\"Australian Labor Party\""));

    let json = ok(&["query", "--json", "--repository", path(&dir.join("repository.nt")), LABOUR_QUERY]);
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(rows.len(), 8);
}

#[test]
fn stages_chain_to_the_pipeline_output() {
    let whole = scratch("whole");
    let steps = scratch("steps");
    ok(&["pipeline", "--bundled", "--out", path(&whole)]);
    for stage in ["clean", "classify", "infer-domains", "annotate", "enrich", "load", "report"] {
        ok(&[stage, "--bundled", "--out", path(&steps)]);
    }
    ok(&["evaluate", "--bundled", "--out", path(&steps)]);
    assert_eq!(files(&whole), files(&steps));
}

#[test]
fn evaluate_counts() {
    let out = ok(&["evaluate", "--counts", "44,15,59"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("retrieved 59\n"));
    assert!(text.contains("relevant 103\n"));
    assert!(text.contains("precision 0.7458\n"));
    assert!(text.contains("recall 0.4272\n"));
    assert!(text.contains("f_measure 0.5432\n"));

    let none = String::from_utf8(ok(&["evaluate", "--counts", "0,0,0"]).stdout).unwrap();
    assert!(none.contains("precision n/a\n"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["evaluate", "--counts", "1,2"]).status.code(), Some(1));
    let dir = scratch("usage");
    assert_eq!(run(&["clean", "--out", path(&dir)]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_two_with_file_and_line() {
    let dir = scratch("data");
    let dataset = dir.join("bad.jsonl");
    fs::write(&dataset, "{\"id\":\"a\",\"user\":\"u\",\"text\":\"hi\"}\n{\"id\":\"a\",\"user\":\"u\",\"text\":\"again\"}\n").unwrap();
    let out = run(&["clean", "--dataset", path(&dataset), "--out", path(&dir)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains(&format!("{}:2:", dataset.display())), "{err}");

    let onto = dir.join("broken.nt");
    fs::write(&onto, "<http://a> <http://b> <http://c> .\nnot a triple\n").unwrap();
    let out = run(&["annotate", "--ontology", path(&onto), "--out", path(&dir)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains(&format!("{}:2:", onto.display())));

    let out = run(&["query", "--out", path(&dir), "SELECT * WHERE { ?s ?p ?o }"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_supplies_flags() {
    let dir = scratch("config");
    let dataset = dir.join("posts.jsonl");
    fs::write(&dataset, "{\"id\":\"x\",\"user\":\"u\",\"text\":\"#Vote for @Labor! http://t.co/x\"}\n").unwrap();
    let config = dir.join("run.toml");
    fs::write(&config, "dataset = \"posts.jsonl\"\nout = \"result\"\n").unwrap();
    ok(&["clean", "--config", path(&config)]);
    let cleaned = fs::read_to_string(dir.join("result/cleaned.jsonl")).unwrap();
    assert!(cleaned.contains("\"text\":\"Vote for Labor\""), "{cleaned}");

    fs::write(&config, "dataset = \"posts.jsonl\"\nmystery = 1\n").unwrap();
    let out = run(&["clean", "--config", path(&config)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains(&format!("{}:2:", config.display())));
}

fn post(addr: &str, body: &str) -> (u16, String) {
    let mut stream = TcpStream::connect(addr).unwrap();
    write!(stream, "POST /query HTTP/1.1\r\nHost: {addr}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}", body.len())
        .unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).unwrap();
    let status = response.split_whitespace().nth(1).unwrap().parse().unwrap();
    let body = response.split_once("\r\n\r\n").unwrap().1.to_string();
    (status, body)
}

#[test]
fn serve_answers_queries() {
    let dir = scratch("serve");
    ok(&["pipeline", "--bundled", "--out", path(&dir)]);
    let mut child = Command::new(BIN)
        .args(["serve", "--out", path(&dir), "--serve-addr", "127.0.0.1:0"])
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
    let addr = line.trim().trim_start_matches("listening on http://").to_string();

    let (status, body) = post(&addr, LABOUR_QUERY);
    let (bad_status, _) = post(&addr, "SELECT nothing");
    let _ = child.kill();
    let _ = child.wait();

    assert_eq!(status, 200);
    let rows: Vec<serde_json::Value> = serde_json::from_str(&body).unwrap();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r["s"] == "http://www.semanticweb.org/ontologies/Politics.owl#labour"));
    assert_eq!(bad_status, 400);
}
