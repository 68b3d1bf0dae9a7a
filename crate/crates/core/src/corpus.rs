//! A fixed collection of example preproofs over the generic, CGT and
//! μ-calculus instances, with their expected verdicts.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{ActivationAlgebra, Elem};
use crate::cgt::{Cgt, CgtRule, GtSequent};
use crate::gtc::TraceInterpretation;
use crate::instance::{build, Compiled, Sketch};
use crate::mu::{Formula, Mu, MuRule, MuSequent, MuTraces};
use crate::proof::{Address, DerivationSystem, Node, Preproof};
use crate::trace::{TraceMorphism, TraceObject};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceTag {
    Generic,
    Cgt,
    Mu(MuTraces),
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub tag: InstanceTag,
    pub expect_proof: bool,
    pub compiled: Compiled,
}

type Triples<'a> = &'a [(u32, u8, u32)];

/// Sequents with object sizes, rules with maps, then the tree and its buds.
fn generic(
    alg: ActivationAlgebra,
    sequents: &[(&str, u32)],
    rules: &[(&str, &str, &[&str], &[Triples<'_>])],
    rows: &[(&str, &str, Option<&str>)],
    buds: &[(&str, &str)],
) -> Compiled {
    let mut system = DerivationSystem::new();
    let mut iota = TraceInterpretation::new(alg.clone());
    for (name, size) in sequents {
        let id = system.sequent(name);
        iota.set_object(id, TraceObject::new(id.0, (0..*size).map(|i| i.to_string()).collect()));
    }
    let seq = |sys: &DerivationSystem, s: &str| sys.find_sequent(s).expect("declared sequent");
    let mut by_name = BTreeMap::new();
    for (name, concl, prems, maps) in rules {
        let c = seq(&system, concl);
        let ps: Vec<_> = prems.iter().map(|p| seq(&system, p)).collect();
        let ms = ps
            .iter()
            .zip(*maps)
            .map(|(p, t)| {
                TraceMorphism::new(&alg, iota.object(c).unwrap(), iota.object(*p).unwrap(), t.iter().map(|&(x, a, y)| (x, Elem(a), y)))
                    .expect("well-typed map")
            })
            .collect();
        let r = system.rule(name, c, ps);
        iota.set_maps(r, ms);
        by_name.insert(*name, r);
    }
    let nodes = rows
        .iter()
        .map(|(a, l, r)| {
            let label = system.find_sequent(l).unwrap();
            (Address::parse(a).unwrap(), Node { label, rule: r.map(|r| by_name[r]) })
        })
        .collect();
    let beta = buds.iter().map(|(t, c)| (Address::parse(t).unwrap(), Address::parse(c).unwrap())).collect();
    Compiled { system, iota, proof: Preproof::from_parts(nodes, beta) }
}

pub fn generic_entries() -> Vec<CorpusEntry> {
    let b = ActivationAlgebra::boolean;
    let f = ActivationAlgebra::failure;
    let entry = |name, expect_proof, compiled| CorpusEntry { name, tag: InstanceTag::Generic, expect_proof, compiled };
    let two_rows: &[(&str, &str, Option<&str>)] = &[("", "A", Some("r")), ("1", "B", Some("s")), ("1.1", "A", None)];
    vec![
        entry(
            "two-node",
            true,
            generic(
                b(),
                &[("A", 1), ("B", 1)],
                &[("r", "A", &["B"], &[&[(0, 1, 0)]]), ("s", "B", &["A"], &[&[(0, 0, 0)]])],
                two_rows,
                &[("1.1", "")],
            ),
        ),
        entry(
            "identity-loop",
            false,
            generic(
                b(),
                &[("A", 1), ("B", 1)],
                &[("r", "A", &["B"], &[&[(0, 0, 0)]]), ("s", "B", &["A"], &[&[(0, 0, 0)]])],
                two_rows,
                &[("1.1", "")],
            ),
        ),
        entry(
            "figure-eight",
            true,
            generic(
                f(),
                &[("X", 2)],
                &[("d", "X", &["X", "X"], &[&[(0, 1, 0), (1, 0, 1)], &[(1, 1, 1), (0, 2, 0)]])],
                &[("", "X", Some("d")), ("1", "X", None), ("2", "X", None)],
                &[("1", ""), ("2", "")],
            ),
        ),
        entry(
            "figure-eight-failing",
            false,
            generic(
                f(),
                &[("X", 1)],
                &[("d", "X", &["X", "X"], &[&[(0, 1, 0)], &[(0, 2, 0)]])],
                &[("", "X", Some("d")), ("1", "X", None), ("2", "X", None)],
                &[("1", ""), ("2", "")],
            ),
        ),
        entry(
            "nested-cycles",
            true,
            generic(
                b(),
                &[("A", 2)],
                &[
                    ("u", "A", &["A"], &[&[(0, 0, 0), (1, 0, 1)]]),
                    ("v", "A", &["A", "A"], &[&[(0, 1, 0), (1, 0, 1)], &[(0, 0, 0), (1, 1, 1)]]),
                ],
                &[("", "A", Some("u")), ("1", "A", Some("v")), ("1.1", "A", None), ("1.2", "A", None)],
                &[("1.1", "1"), ("1.2", "")],
            ),
        ),
    ]
}

fn gt(s: &str) -> GtSequent {
    GtSequent::parse(s).expect("corpus sequent")
}

pub fn cgt_entries() -> Vec<CorpusEntry> {
    use CgtRule::*;
    use Sketch as K;
    let r = |rule, subs| K::rule(rule, subs);
    let leaf = |rule| K::rule(rule, vec![]);
    let cases: Vec<(&'static str, bool, &str, Sketch<CgtRule>)> = vec![
        ("cond-loop", true, "N => N", K::named("r", r(Cond, vec![leaf(Zero), K::Bud("r")]))),
        ("two-var-cond", true, "N, N => N", K::named("r", r(Cond, vec![leaf(Succ), K::Bud("r")]))),
        ("exchange-loop", false, "N, N => N", K::named("r", r(Ex(0), vec![K::Bud("r")]))),
        (
            "lexicographic",
            true,
            "N, N => N",
            K::named(
                "r",
                r(Cond, vec![K::named("s", r(Cond, vec![leaf(Zero), K::Bud("s")])), r(Ex(0), vec![K::Bud("r")])]),
            ),
        ),
        ("contract-weaken-loop", false, "N => N", K::named("r", r(Ctr, vec![r(Wk, vec![K::Bud("r")])]))),
        (
            "swap-progress",
            true,
            "N, N => N",
            K::named(
                "r",
                r(Cond, vec![leaf(Succ), r(Ex(0), vec![r(Cond, vec![leaf(Succ), r(Ex(0), vec![K::Bud("r")])])])]),
            ),
        ),
        (
            "arrow-intro",
            true,
            "N => (N->N)",
            r(R, vec![K::named("a", r(Cond, vec![leaf(Succ), K::Bud("a")]))]),
        ),
        (
            "arrow-elim",
            true,
            "N, (N->N) => N",
            r(L, vec![leaf(Succ), K::named("a", r(Cond, vec![leaf(Succ), K::Bud("a")]))]),
        ),
        (
            "cond-contract-loop",
            false,
            "N, N => N",
            K::named("r", r(Cond, vec![r(Ctr, vec![K::Bud("r")]), K::Bud("r")])),
        ),
        (
            "cut-weaken-loop",
            false,
            "N => N",
            K::named("r", r(Cut(crate::cgt::Ty::N), vec![leaf(Succ), r(Wk, vec![K::Bud("r")])])),
        ),
    ];
    cases
        .into_iter()
        .map(|(name, expect_proof, root, sk)| CorpusEntry {
            name,
            tag: InstanceTag::Cgt,
            expect_proof,
            compiled: build(&Cgt, gt(root), &sk).expect("corpus proof elaborates"),
        })
        .collect()
}

fn fm(s: &str) -> Formula {
    Formula::parse(s).expect("corpus formula")
}

/// The μ-calculus examples as `(name, expected verdict, root, sketch)`.
pub fn mu_sketches() -> Vec<(&'static str, bool, MuSequent, Sketch<MuRule>)> {
    use MuRule as M;
    use Sketch as K;
    let r = |rule, subs| K::rule(rule, subs);
    let seq = |fs: &[&str]| MuSequent::new(fs.iter().map(|s| fm(s)));
    let nu_box = fm("nu x.[]x");
    let phi = fm("nu x.mu y.(<>y | []x)");
    let psi = phi.unfold().unwrap();
    let psi_body = psi.unfold().unwrap();
    let mu_dia = fm("mu x.<>x");
    let nu_box_y = fm("nu y.[]y");
    let theta = fm("mu y.[]nu x.[]y");
    let theta1 = theta.unfold().unwrap();
    let Formula::Box(theta2) = theta1.clone() else { unreachable!() };
    let theta2 = *theta2;
    let conj = fm("nu x.([]x & []x)");
    let conj_ax = fm("nu x.([]x & (p | ~p))");
    let chi_outer = fm("mu y.nu x.([]x & []y)");
    let chi = chi_outer.unfold().unwrap();
    let chi_body = chi.unfold().unwrap();
    let bx = |f: &Formula| Formula::boxed(f.clone());
    let loop_on = |f: &Formula, tag: &'static str| {
        K::named(tag, r(M::Nu(f.clone()), vec![r(M::Mod(bx(f)), vec![K::Bud(tag)])]))
    };
    vec![
        ("nu-box", true, seq(&["nu x.[]x"]), loop_on(&nu_box, "r")),
        (
            "mu-box",
            false,
            seq(&["mu x.[]x"]),
            K::named("r", r(M::Mu(fm("mu x.[]x")), vec![r(M::Mod(fm("[]mu x.[]x")), vec![K::Bud("r")])])),
        ),
        (
            "alternation",
            true,
            MuSequent::new([phi.clone()]),
            r(
                M::Nu(phi.clone()),
                vec![K::named(
                    "r",
                    r(
                        M::Mu(psi.clone()),
                        vec![r(
                            M::Or(psi_body.clone()),
                            vec![r(M::Mod(bx(&phi)), vec![r(M::Nu(phi.clone()), vec![K::Bud("r")])])],
                        )],
                    ),
                )],
            ),
        ),
        (
            "mu-dia-nu-box",
            true,
            MuSequent::new([mu_dia.clone(), nu_box_y.clone()]),
            K::named(
                "r",
                r(M::Nu(nu_box_y.clone()), vec![r(M::Mu(mu_dia.clone()), vec![r(M::Mod(bx(&nu_box_y)), vec![K::Bud("r")])])]),
            ),
        ),
        (
            "mu-dia-mu-box",
            false,
            seq(&["mu x.<>x", "mu y.[]y"]),
            K::named(
                "r",
                r(
                    M::Mu(fm("mu y.[]y")),
                    vec![r(M::Mu(mu_dia.clone()), vec![r(M::Mod(fm("[]mu y.[]y")), vec![K::Bud("r")])])],
                ),
            ),
        ),
        (
            "mu-over-nu",
            false,
            MuSequent::new([theta.clone()]),
            K::named(
                "r",
                r(
                    M::Mu(theta.clone()),
                    vec![r(M::Mod(theta1.clone()), vec![r(M::Nu(theta2.clone()), vec![r(M::Mod(bx(&theta)), vec![K::Bud("r")])])])],
                ),
            ),
        ),
        (
            "nu-and",
            true,
            MuSequent::new([conj.clone()]),
            K::named(
                "r",
                r(
                    M::Nu(conj.clone()),
                    vec![r(
                        M::And(conj.unfold().unwrap()),
                        vec![r(M::Mod(bx(&conj)), vec![K::Bud("r")]), r(M::Mod(bx(&conj)), vec![K::Bud("r")])],
                    )],
                ),
            ),
        ),
        (
            "nu-and-axiom",
            true,
            MuSequent::new([conj_ax.clone()]),
            K::named(
                "r",
                r(
                    M::Nu(conj_ax.clone()),
                    vec![r(
                        M::And(conj_ax.unfold().unwrap()),
                        vec![
                            r(M::Mod(bx(&conj_ax)), vec![K::Bud("r")]),
                            r(M::Or(fm("p | ~p")), vec![r(M::Ax, vec![])]),
                        ],
                    )],
                ),
            ),
        ),
        (
            "nu-or-weaken",
            true,
            seq(&["(nu x.[]x) | q"]),
            r(M::Or(fm("(nu x.[]x) | q")), vec![r(M::Wk(fm("q")), vec![loop_on(&nu_box, "r")])]),
        ),
        ("excluded-middle", true, seq(&["p | ~p"]), r(M::Or(fm("p | ~p")), vec![r(M::Ax, vec![])])),
        (
            "nu-box-dia",
            true,
            seq(&["nu x.[]x", "<>p"]),
            r(
                M::Nu(nu_box.clone()),
                vec![r(M::Mod(bx(&nu_box)), vec![r(M::Wk(fm("p")), vec![loop_on(&nu_box, "r")])])],
            ),
        ),
        (
            "mu-nu-and",
            false,
            MuSequent::new([chi_outer.clone()]),
            K::named(
                "r",
                r(
                    M::Mu(chi_outer.clone()),
                    vec![K::named(
                        "s",
                        r(
                            M::Nu(chi.clone()),
                            vec![r(
                                M::And(chi_body.clone()),
                                vec![r(M::Mod(bx(&chi)), vec![K::Bud("s")]), r(M::Mod(bx(&chi_outer)), vec![K::Bud("r")])],
                            )],
                        ),
                    )],
                ),
            ),
        ),
    ]
}

pub fn mu_entries(traces: MuTraces) -> Vec<CorpusEntry> {
    mu_sketches()
        .into_iter()
        .map(|(name, expect_proof, root, sk)| CorpusEntry {
            name,
            tag: InstanceTag::Mu(traces),
            expect_proof,
            compiled: build(&Mu(traces), root, &sk).expect("corpus proof elaborates"),
        })
        .collect()
}

/// Generic, CGT and μ (over 𝔽) entries.
pub fn all() -> Vec<CorpusEntry> {
    let mut out = generic_entries();
    out.extend(cgt_entries());
    out.extend(mu_entries(MuTraces::Failure));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gtc::check_gtc;

    #[test]
    fn corpus_validates_and_matches_expectations() {
        let mut entries = all();
        entries.extend(mu_entries(MuTraces::Boolean));
        for e in &entries {
            let c = &e.compiled;
            c.proof.validate(&c.system).unwrap_or_else(|v| panic!("{}: {v}", e.name));
            c.iota.validate(&c.system).unwrap_or_else(|v| panic!("{}: {v}", e.name));
            let v = check_gtc(&c.proof, &c.iota).unwrap();
            assert_eq!(v.is_proof(), e.expect_proof, "{} ({:?})", e.name, e.tag);
        }
    }

    #[test]
    fn corpus_sizes() {
        let proofs = all().iter().filter(|e| e.expect_proof).count();
        assert!(proofs >= 15);
        let mu = mu_entries(MuTraces::Failure);
        assert!(mu.len() >= 10 && mu.iter().filter(|e| !e.expect_proof).count() >= 3);
    }
}
