use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use resetproof::{Bundle, InstanceSpec};
use resetproof_core::corpus::{all, CorpusEntry};
use resetproof_core::gtc::{edge_morphism, TraceInterpretation};
use resetproof_core::proof::Node;
use resetproof_core::reset::{AnnotatedSequent, StepKind};
use resetproof_core::trace::TraceObject;
use resetproof_core::{ActivationAlgebra, Address, DerivationSystem, Obj, Preproof, SafraBoard, TraceMorphism};
use serde_json::Value;
use tempfile::TempDir;

fn entry(name: &str) -> CorpusEntry {
    all().into_iter().find(|c| c.name == name).unwrap()
}

fn write(dir: &TempDir, name: &str, b: &Bundle) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, b.to_json()).unwrap();
    p
}

fn run(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("resetproof").chain(args.iter().copied());
    let code = resetproof::cli::run(argv, &mut out, &mut err).unwrap();
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|e| panic!("{e}: {s}"))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_gtc_exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = entry("nu-box");
    let f = write(&dir, "good.json", &Bundle::from_compiled(good.tag.into(), &good.compiled));
    let (code, out, _) = run(&["check-gtc", path(&f)]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["verdict"], "proof");

    let bad = entry("mu-box");
    let f = write(&dir, "bad.json", &Bundle::from_compiled(bad.tag.into(), &bad.compiled));
    let (code, out, _) = run(&["check-gtc", path(&f)]);
    assert_eq!(code, 1);
    let v = json(&out);
    assert_eq!(v["verdict"], "counterexample");
    assert!(!v["lasso"]["cycle"].as_array().unwrap().is_empty());
}

/// A one-node loop annotated with the empty board and no reset.
fn missing_reset_bundle() -> Bundle {
    let alg = ActivationAlgebra::boolean();
    let mut sys = DerivationSystem::new();
    let a = sys.sequent("A");
    let w = sys.rule("w", a, vec![a]);
    let mut iota = TraceInterpretation::new(alg);
    iota.set_object(a, TraceObject::new(0, vec!["x".to_string()]));
    iota.set_maps(w, vec![TraceMorphism::identity(Obj::new(0, 1))]);
    let e = AnnotatedSequent { base: a, board: SafraBoard::empty(Obj::new(0, 1)) };
    let nodes = BTreeMap::from([
        (Address::root(), Node { label: e.clone(), rule: Some(StepKind::Lifted(w)) }),
        (Address(vec![1]), Node { label: e, rule: None }),
    ]);
    let rp = Preproof::from_parts(nodes, BTreeMap::from([(Address(vec![1]), Address::root())]));
    Bundle::from_reset(InstanceSpec::Generic, &sys, &iota, &rp)
}

#[test]
fn check_reset_reports_the_failing_bud() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "r.json", &missing_reset_bundle());
    let (code, out, _) = run(&["check-reset", path(&f)]);
    assert_eq!(code, 1);
    let v = json(&out);
    assert_eq!(v["verdict"], "failing-bud");
    assert_eq!(v["bud"], "1");
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = TempDir::new().unwrap();
    let c = entry("cond-loop");
    let mut b = Bundle::from_compiled(c.tag.into(), &c.compiled);
    // drop an inner node so its children lose their parent
    let i = b.proof.nodes.iter().position(|n| n.addr == vec![1]).unwrap();
    b.proof.nodes.remove(i);
    let f = write(&dir, "gap.json", &b);
    let (code, out, _) = run(&["validate", path(&f)]);
    assert_eq!(code, 2);
    assert!(json(&out)["error"].is_string());

    let g = dir.path().join("garbage.json");
    std::fs::write(&g, "{ not json").unwrap();
    assert_eq!(run(&["info", path(&g)]).0, 2);
    assert_eq!(run(&["check-gtc", "/nonexistent/bundle.json"]).0, 2);
    assert_eq!(run(&["no-such-verb"]).0, 2);

    // plain bundle where a reset bundle is expected
    let f = write(&dir, "plain.json", &Bundle::from_compiled(c.tag.into(), &c.compiled));
    assert_eq!(run(&["check-reset", path(&f)]).0, 2);
}

#[test]
fn validate_accepts_corpus_proofs() {
    let dir = TempDir::new().unwrap();
    for c in all() {
        let f = write(&dir, "p.json", &Bundle::from_compiled(c.tag.into(), &c.compiled));
        let (code, out, _) = run(&["validate", path(&f)]);
        assert_eq!(code, 0, "{}: {out}", c.name);
    }
}

#[test]
fn annotate_then_strip_round_trip() {
    let dir = TempDir::new().unwrap();
    let c = entry("cond-loop");
    let f = write(&dir, "p.json", &Bundle::from_compiled(c.tag.into(), &c.compiled));
    let r = dir.path().join("r.json");
    let (code, out, _) = run(&["annotate", path(&f), "--output", path(&r)]);
    assert_eq!(code, 0);
    let report = json(&out);
    assert!(report["depth"].as_u64().unwrap() <= report["bound"].as_u64().unwrap());
    assert!(!report["invariants"].as_object().unwrap().is_empty());

    let (code, out, _) = run(&["check-reset", path(&r)]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(run(&["validate", path(&r)]).0, 0);

    let (code, stripped, _) = run(&["strip", path(&r)]);
    assert_eq!(code, 0);
    let s = dir.path().join("s.json");
    std::fs::write(&s, &stripped).unwrap();
    assert_eq!(run(&["check-gtc", path(&s)]).0, 0);
    assert_eq!(run(&["validate", path(&s)]).0, 0);
    // and once more around the chain
    let r2 = dir.path().join("r2.json");
    assert_eq!(run(&["annotate", path(&s), "--output", path(&r2)]).0, 0);
    let (code, again, _) = run(&["strip", path(&r2)]);
    assert_eq!(code, 0);
    let s2 = dir.path().join("s2.json");
    std::fs::write(&s2, &again).unwrap();
    assert_eq!(run(&["validate", path(&s2)]).0, 0);

    // annotating to stdout sends the report to stderr
    let (code, out, err) = run(&["annotate", path(&f), "--K", "2"]);
    assert_eq!(code, 0);
    assert!(Bundle::from_json(&out).unwrap().reset);
    assert_eq!(json(&err)["K"], 2);
}

#[test]
fn annotate_rejects_non_proofs() {
    let dir = TempDir::new().unwrap();
    let c = entry("exchange-loop");
    let f = write(&dir, "p.json", &Bundle::from_compiled(c.tag.into(), &c.compiled));
    let (code, out, _) = run(&["annotate", path(&f)]);
    assert_eq!(code, 1);
    assert!(json(&out)["lasso"]["cycle"].is_array());
}

#[test]
fn lasso_queries() {
    let dir = TempDir::new().unwrap();
    let c = entry("nu-box");
    let b = Bundle::from_compiled(c.tag.into(), &c.compiled);
    let f = write(&dir, "p.json", &b);
    let l = b.load().unwrap();
    // the letters along the only cycle: root down to the bud
    let p = l.plain().unwrap();
    let (bud, _) = p.beta().iter().next().unwrap();
    let spine: Vec<Address> = (0..=bud.0.len()).map(|i| Address(bud.0[..i].to_vec())).collect();
    let letters: Vec<String> = spine
        .windows(2)
        .map(|w| {
            let m = edge_morphism(p, &l.iota, &w[0], &w[1]);
            l.morphisms.iter().position(|n| *n == m).unwrap().to_string()
        })
        .collect();
    let i = letters.join(",");
    for verb in ["lasso-buchi", "lasso-rabin"] {
        let (code, out, _) = run(&[verb, path(&f), "--loop", &i]);
        assert_eq!(code, 0, "{verb}: {out}");
        assert_eq!(json(&out)["accepted"], true);
    }
    assert_eq!(run(&["lasso-buchi", path(&f), "--loop", "9999"]).0, 2);
}

#[test]
fn unfold_info_and_dot() {
    let dir = TempDir::new().unwrap();
    let c = entry("cond-loop");
    let b = Bundle::from_compiled(c.tag.into(), &c.compiled);
    let f = write(&dir, "p.json", &b);
    let bud = b.proof.beta[0].bud.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".");
    let (code, out, _) = run(&["unfold", path(&f), "--bud", &bud]);
    assert_eq!(code, 0);
    let u = Bundle::from_json(&out).unwrap();
    assert!(u.proof.nodes.len() > b.proof.nodes.len());
    let uf = write(&dir, "u.json", &u);
    assert_eq!(run(&["check-gtc", path(&uf)]).0, 0);
    assert_eq!(run(&["unfold", path(&f), "--bud", "7.7.7"]).0, 2);

    let (code, out, _) = run(&["info", path(&f)]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["nodes"], b.proof.nodes.len());
    assert!(v["board_bound"].as_f64().unwrap() >= 1.0);

    let (code, out, _) = run(&["export-dot", path(&f)]);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph"));
    assert!(out.contains("style=dashed"));
}

#[test]
fn binary_reports_exit_codes() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "r.json", &missing_reset_bundle());
    let st = Command::new(env!("CARGO_BIN_EXE_resetproof")).args(["check-reset", path(&f)]).output().unwrap();
    assert_eq!(st.status.code(), Some(1));
    let st = Command::new(env!("CARGO_BIN_EXE_resetproof")).args(["validate", path(&f)]).output().unwrap();
    assert_eq!(st.status.code(), Some(0));
}
