use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use topent_core::construct::{quotient_example, sides_at, QuotientKind};
use topent_core::graph::PointOnGraph;
use topent_core::io::write_unfold;
use topent_core::logval::LogValue;
use topent_core::rational::{parse_rational, rat};

const THETA: &str = r#"{"vertices":["a","b"],"edges":[{"id":"e1","ends":["a","b"],"length":"1/1"},{"id":"e2","ends":["a","b"],"length":"1/1"},{"id":"e3","ends":["a","b"],"length":"1/1"}]}"#;

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("topent-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn topent(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_topent")).current_dir(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn log_of(record: &Value) -> LogValue {
    let q = parse_rational(record["radicand"].as_str().unwrap()).unwrap();
    LogValue::new(q, record["root"].as_u64().unwrap())
}

#[test]
fn kappa_of_theta_is_five() {
    let d = scratch("kappa");
    fs::write(d.join("theta.json"), THETA).unwrap();
    let o = topent(&d, &["kappa", "theta.json"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "5");
    let o = topent(&d, &["kappa", "theta.json", "--check"]);
    assert!(stdout(&o).contains("subgraph enumeration: 5"));
}

#[test]
fn tent_entropy_is_log_three_at_depth_zero() {
    let d = scratch("tent");
    assert!(topent(&d, &["construct", "tent3", "-o", "t.json"]).status.success());
    let o = topent(&d, &["entropy", "t.json", "--tol", "1/1000000", "--report", "r.json"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("lower  log(3)\n") && out.contains("upper  log(3)\n"), "{out}");
    assert!(out.contains("1.098612288668"));
    let r = report(&d, "r.json");
    assert_eq!(r["results"]["depth"], 0);
    assert_eq!(log_of(&r["results"]["lower"]), LogValue::of(3, 1));
    assert_eq!(log_of(&r["results"]["upper"]), LogValue::of(3, 1));
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn four_star_entropy_is_below_the_bound() {
    let d = scratch("star");
    let o = topent(&d, &["construct", "star", "--n", "4", "--eps", "1/10", "-o", "s4.json"]);
    assert!(o.status.success());
    assert!(d.join("s4.json.trace.json").exists());
    assert!(topent(&d, &["entropy", "s4.json", "--report", "r.json"]).status.success());
    let upper = log_of(&report(&d, "r.json")["results"]["upper"]);
    assert!(upper.lt_plus(&LogValue::of(3, 4), &rat(1, 10)));
    assert!(upper >= LogValue::of(3, 4));
}

#[test]
fn results_are_reproducible() {
    let d = scratch("repro");
    assert!(topent(&d, &["construct", "b1", "-o", "b1.json"]).status.success());
    for name in ["a.json", "b.json"] {
        let o = topent(&d, &["--seed", "7", "construct", "totalize", "--map", "b1.json", "-o", "t.json", "--report", name]);
        assert!(o.status.success());
    }
    assert_eq!(report(&d, "a.json")["results"], report(&d, "b.json")["results"]);
    let first = fs::read(d.join("t.json")).unwrap();
    assert!(topent(&d, &["check", "t.json"]).status.success());
    assert_eq!(fs::read(d.join("t.json")).unwrap(), first);
}

#[test]
fn exit_codes() {
    let d = scratch("exit");
    assert_eq!(topent(&d, &["kappa", "missing.json"]).status.code(), Some(1));
    fs::write(d.join("bad.json"), THETA.replace("\"1/1\"", "\"2/2\"")).unwrap();
    let o = topent(&d, &["kappa", "bad.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("edges[0].length"));
    fs::write(d.join("broken.json"), "{\n  \"vertices\": [\"a\",\n").unwrap();
    let o = topent(&d, &["kappa", "broken.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    assert!(topent(&d, &["construct", "tent3", "-o", "t.json"]).status.success());
    assert_eq!(topent(&d, &["periodic", "t.json", "--n", "12", "--cap", "10"]).status.code(), Some(2));
    assert_eq!(topent(&d, &["construct", "totalize", "--map", "t.json", "-o", "x.json"]).status.code(), Some(1));
    assert_eq!(topent(&d, &["construct", "wedge", "--map", "t.json", "--at", "nowhere", "--k", "2", "-o", "x.json"]).status.code(), Some(1));
    assert_eq!(topent(&d, &["no-such-command"]).status.code(), Some(1));
}

#[test]
fn periodic_horseshoe_and_witness() {
    let d = scratch("tools");
    assert!(topent(&d, &["construct", "tent3", "-o", "t.json"]).status.success());
    let o = topent(&d, &["periodic", "t.json", "--n", "2"]);
    assert!(stdout(&o).starts_with("9 points"));
    assert!(stdout(&topent(&d, &["horseshoe", "t.json", "--s", "3"])).starts_with("tight 3-horseshoe"));
    fs::write(d.join("req.json"), r#"{"segments":[["e#0"],["e#1"]],"gap":1,"period":2}"#).unwrap();
    let o = topent(&d, &["witness", "t.json", "--request", "req.json"]);
    assert!(o.status.success());
    let w: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(w["point"]["offset"], "1/5");
    assert!(topent(&d, &["dot", "t.json", "-o", "t.dot"]).status.success());
    let dot = fs::read_to_string(d.join("t.dot")).unwrap();
    assert_eq!(dot.matches("->").count(), 9);
}

#[test]
fn unfold_reproduces_the_sigma_tree() {
    let d = scratch("unfold");
    let ex = quotient_example(QuotientKind::Sigma, &rat(1, 10)).unwrap();
    let vs: Vec<usize> = ex
        .inaccessible
        .iter()
        .filter_map(|x| match x {
            PointOnGraph::Vertex(v) => Some(*v),
            PointOnGraph::Interior { .. } => None,
        })
        .collect();
    fs::write(d.join("pair.json"), write_unfold(&ex.map, &sides_at(&ex.graph, &vs))).unwrap();
    let o = topent(&d, &["unfold", "pair.json", "-o", "tree.json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("semiconjugacy on 1000 samples: true"));
    let tree = topent_core::io::parse_map(&fs::read_to_string(d.join("tree.json")).unwrap(), None).unwrap();
    assert!(topent_core::construct::same_up_to_vertex_names(&tree, &ex.tree.map));
}
