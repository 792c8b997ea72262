use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use genus2_core::curve::make_curve;
use genus2_core::ipoly::from_desc;
use genus2_core::jacobian::{to_odd_degree_model, DivRecord};
use genus2_core::pipeline::{GeneratorSpec, TorsionRecord};
use genus2_core::search::RatPoint;
use genus2_core::serial::rat_from_str;
use serde_json::Value;

const GOLDEN: &str = "-1 -2 -1 -1 -2 -1 2";

fn genus2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genus2"))
        .args(args)
        .env_remove("GENUS2_CACHE_DIR")
        .output()
        .unwrap()
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn decide_golden_curve() {
    let out = genus2(&["--json", "decide", "--curve", GOLDEN]);
    assert_eq!(out.status.code(), Some(0));
    let v = &json_lines(&out)[0];
    assert_eq!(v["status"], "EMPTY_DESCENT");
    assert_eq!(v["complete"], true);
    assert_eq!(v["points"].as_array().unwrap().len(), 0);
    // the stored key is the normalized curve
    assert_eq!(v["curve"], "-1 2 -1 1 -2 1 2");
}

#[test]
fn exit_codes() {
    assert_eq!(
        genus2(&["decide", "--curve", "1 2 q"]).status.code(),
        Some(3)
    );
    assert_eq!(
        genus2(&["decide", "--curve", "1 0 1"]).status.code(),
        Some(3)
    );
    assert_eq!(genus2(&["frobnicate"]).status.code(), Some(3));
    let undecided = genus2(&[
        "decide",
        "--curve",
        "-1 0 0 0 0 0 -1",
        "--stop-after",
        "search",
    ]);
    assert_eq!(undecided.status.code(), Some(2));
    assert_eq!(genus2(&["--version"]).status.code(), Some(0));
}

#[test]
fn batch_isolates_bad_lines() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_genus2"))
        .args(["--json", "decide", "--input", "-"])
        .env_remove("GENUS2_CACHE_DIR")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let input = "1 0 0 0 0 1\n# comment\n\nnot a curve\n{\"curve\": \"-1 0 0 0 0 0 -1\"}\n";
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["status"], "HAS_POINTS");
    assert_eq!(lines[1]["line"], "4");
    assert!(lines[1]["error"].is_string());
    assert_eq!(lines[2]["status"], "EMPTY_LOCAL");
}

#[test]
fn cache_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let a = genus2(&["--json", "--cache-dir", d, "decide", "--curve", GOLDEN]);
    let b = genus2(&["--json", "--cache-dir", d, "decide", "--curve", GOLDEN]);
    assert_eq!(a.stdout, b.stdout);
    let text = std::fs::read_to_string(dir.path().join("decisions.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 1);
}

#[test]
fn subcommands_report_json() {
    let s = json_lines(&genus2(&[
        "--json", "search", "--curve", "x^5+1", "--bound", "20",
    ]));
    // (-1, 0), (0, 1), (0, -1) and the point at infinity
    assert_eq!(s[0]["search"]["points"].as_array().unwrap().len(), 4);
    let l = json_lines(&genus2(&[
        "--json", "local", "--curve", GOLDEN, "--place", "3",
    ]));
    assert_eq!(l[0]["place"]["solvable"], true);
    // p = 3 has order 4 mod 5, so #J(F_3) = p^2 + 1
    let j = json_lines(&genus2(&[
        "--json", "jacobian", "--curve", "x^5+1", "--prime", "3",
    ]));
    assert_eq!(j[0]["order"], "10");
    let d = genus2(&["--json", "descent", "--curve", GOLDEN]);
    assert_eq!(d.status.code(), Some(0));
    let c = genus2(&["--json", "census", "--samples", "20", "--seed", "3"]);
    assert!(matches!(c.status.code(), Some(0) | Some(2)));
    assert_eq!(json_lines(&c)[0]["total"], "20");
}

fn rank0_generators(path: &Path) {
    let c = make_curve(from_desc(&[1, 0, 0, 0, 0, 1])).unwrap();
    let m = to_odd_degree_model(&c).unwrap();
    let pt = |x: &str, y: &str| RatPoint::Affine {
        x: rat_from_str(x).unwrap(),
        y: rat_from_str(y).unwrap(),
    };
    let div = |p: RatPoint| DivRecord::from_q(&m.point_divisor(&m.to_odd(&p).unwrap()).unwrap());
    let spec = GeneratorSpec {
        free: vec![],
        torsion: vec![
            TorsionRecord {
                div: div(pt("0", "1")),
                order: 5,
            },
            TorsionRecord {
                div: div(pt("-1", "0")),
                order: 2,
            },
        ],
        index_coprime: false,
    };
    std::fs::write(path, serde_json::to_string(&spec).unwrap()).unwrap();
}

#[test]
fn determination_with_generators() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("gens.json");
    rank0_generators(&g);
    let gp = g.to_str().unwrap();
    let out = genus2(&["--json", "decide", "--curve", "x^5+1", "--generators", gp]);
    assert_eq!(out.status.code(), Some(0));
    let v = &json_lines(&out)[0];
    assert_eq!(v["status"], "DETERMINED_COMPLETE");
    assert_eq!(v["points"].as_array().unwrap().len(), 4);
    let ch = genus2(&["--json", "chabauty", "--curve", "x^5+1", "--generators", gp]);
    assert_eq!(ch.status.code(), Some(0));
    let sv = genus2(&[
        "--json",
        "sieve",
        "--curve",
        "x^5+1",
        "--generators",
        gp,
        "--n",
        "10",
        "--primes",
        "3,7..20",
    ]);
    assert_eq!(sv.status.code(), Some(0));
}
