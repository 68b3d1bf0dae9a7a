use resetproof::{Bundle, InstanceSpec};
use resetproof_core::corpus::{all, mu_entries};
use resetproof_core::mu::MuTraces;
use resetproof_core::search::{annotate, default_k, expand, same_unravelling};

fn corpus() -> Vec<resetproof_core::corpus::CorpusEntry> {
    let mut v = all();
    v.extend(mu_entries(MuTraces::Boolean));
    v
}

#[test]
fn plain_bundles_round_trip() {
    for c in corpus() {
        let b = Bundle::from_compiled(c.tag.into(), &c.compiled);
        let back = Bundle::from_json(&b.to_json()).unwrap();
        assert_eq!(back, b, "{}", c.name);
        let l = back.load().unwrap_or_else(|e| panic!("{}: {e}", c.name));
        assert_eq!(l.to_bundle(), b, "{}", c.name);
        assert_eq!(l.plain().unwrap(), &c.compiled.proof, "{}", c.name);
    }
}

#[test]
fn reset_bundles_round_trip() {
    for c in corpus().into_iter().filter(|c| c.expect_proof) {
        let (sys, iota, p) = (&c.compiled.system, &c.compiled.iota, &c.compiled.proof);
        let an = annotate(p, iota, default_k(p, iota), None).unwrap();
        let rp = expand(&an.proof).unwrap();
        let b = Bundle::from_reset(c.tag.into(), sys, iota, &rp);
        let l = Bundle::from_json(&b.to_json()).unwrap().load().unwrap_or_else(|e| panic!("{}: {e}", c.name));
        assert_eq!(l.reset().unwrap(), &rp, "{}", c.name);
        assert_eq!(l.to_bundle(), b);
    }
}

#[test]
fn instance_tables_are_checked() {
    let c = resetproof_core::corpus::cgt_entries().into_iter().find(|c| c.name == "cond-loop").unwrap();
    let b = Bundle::from_compiled(InstanceSpec::Cgt, &c.compiled);
    assert!(b.load().is_ok());
    // a generic bundle may carry any trace objects, an instance bundle may not
    let mut cgt = b.clone();
    cgt.objects[0].elements.push("ghost".into());
    assert!(cgt.load().is_err());
    let mut generic = cgt.clone();
    generic.instance = InstanceSpec::Generic;
    assert!(generic.load().is_ok());
    let mut renamed = b.clone();
    renamed.rules[0].name = "NoSuchRule".into();
    assert!(renamed.load().is_err());
}

#[test]
fn dangling_references_are_rejected() {
    let c = &all()[0];
    let mut b = Bundle::from_compiled(c.tag.into(), &c.compiled);
    b.proof.nodes[0].sequent = "no such sequent".into();
    assert!(b.load().is_err());
    let mut b = Bundle::from_compiled(c.tag.into(), &c.compiled);
    b.rules[0].maps = vec![usize::MAX];
    assert!(b.load().is_err());
}

#[test]
fn stripped_reset_bundle_unravels_like_the_input() {
    for c in corpus().into_iter().filter(|c| c.expect_proof) {
        let (sys, iota, p) = (&c.compiled.system, &c.compiled.iota, &c.compiled.proof);
        let rp = expand(&annotate(p, iota, default_k(p, iota), None).unwrap().proof).unwrap();
        let l = Bundle::from_reset(c.tag.into(), sys, iota, &rp).load().unwrap();
        let s = resetproof_core::reset::strip(&l.system, l.reset().unwrap()).unwrap();
        assert!(same_unravelling(p, &s), "{}", c.name);
    }
}
