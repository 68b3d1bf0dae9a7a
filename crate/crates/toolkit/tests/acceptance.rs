//! The acceptance suite: one pass/fail line per criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use resetproof_core::automata::{build_buchi, build_safra_automaton};
use resetproof_core::board::{greedy_next, supply_size, ChipSupply, Stack};
use resetproof_core::corpus::{all, mu_entries, CorpusEntry, InstanceTag};
use resetproof_core::gtc::{check_gtc, check_gtc_oracle, Verdict};
use resetproof_core::mu::MuTraces;
use resetproof_core::proof::Node;
use resetproof_core::reset::{check_reset_condition, reset_condition_traced, strip, ResetPreproof, StepKind};
use resetproof_core::search::{annotate, default_k, expand, replay_unfolding, strip_search, unfolding_sequence};
use resetproof_core::trace::compose;
use resetproof_core::{ActivationAlgebra, Address, Chip, Elem, Obj, Preproof, SafraBoard, TraceMorphism};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let detail = f()?;
    let el = t.elapsed();
    ensure(el < limit, || format!("took {el:?}, limit {limit:?}"))?;
    Ok(format!("{detail}, {el:.2?}"))
}

// ---------------------------------------------------------------- figures

const W: u32 = 0;
const X: u32 = 1;
const Y: u32 = 2;
const Z: u32 = 3;
// chips a..e
const A: Chip = 0;
const B: Chip = 1;
const C: Chip = 2;
const D: Chip = 3;
const E: Chip = 4;

fn cells(b: &SafraBoard) -> Vec<((u32, u8), Vec<Stack>)> {
    b.sigma().iter().map(|(&(x, a), v)| ((x, a.0), v.iter().cloned().collect())).collect()
}

fn sorted(mut v: Vec<Stack>) -> Vec<Stack> {
    v.sort();
    v
}

fn figures() -> Outcome {
    let f = ActivationAlgebra::failure();
    let obj = Obj::new(0, 4);
    let b = SafraBoard::new(
        obj,
        vec![A, B, C, D, E],
        [
            ((W, Elem(0)), vec![vec![A]]),
            ((X, Elem(0)), vec![vec![B]]),
            ((Y, Elem(0)), vec![vec![C, D]]),
            ((Z, Elem(0)), vec![vec![E]]),
        ],
        &f,
    )
    .map_err(|e| e.to_string())?;
    let tau = TraceMorphism::new(&f, obj, obj, [(X, 1, X), (X, 1, Y), (Y, 0, Y), (Y, 1, Y), (Z, 2, Z)].map(|(x, a, y)| (x, Elem(a), y)))
        .map_err(|e| e.to_string())?;
    ensure(b.covered_chips() == vec![C], || "covered chips of the input board".into())?;

    // successor: fresh chips g, h up to renaming
    let (s, fresh) = b.tau_successor(&f, &tau, &mut ChipSupply::unbounded()).map_err(|e| e.to_string())?;
    ensure(fresh.len() == 2, || format!("{} fresh chips", fresh.len()))?;
    let (g, h) = (fresh[0], fresh[1]);
    ensure(s.control() == [B, C, D, E, g, h], || format!("successor control {:?}", s.control()))?;
    let want = vec![
        ((X, 0), vec![vec![B, g]]),
        ((Y, 0), sorted(vec![vec![C, D], vec![B, h], vec![C, D, h]])),
        ((Z, 2), vec![vec![E]]),
    ];
    ensure(cells(&s) == want, || format!("successor cells {:?}", cells(&s)))?;

    // thinning keeps the least stack of (y,0)
    let t = s.thin();
    ensure(t.control() == [B, E, g, h], || format!("thinned control {:?}", t.control()))?;
    let want = vec![((X, 0), vec![vec![B, g]]), ((Y, 0), vec![vec![B, h]]), ((Z, 2), vec![vec![E]])];
    ensure(cells(&t) == want, || format!("thinned cells {:?}", cells(&t)))?;
    ensure(t.covered_chips() == vec![B], || format!("covered after thinning {:?}", t.covered_chips()))?;

    // reset at b
    let r = t.reset(B).map_err(|e| e.to_string())?;
    ensure(r.control() == [B, E], || format!("reset control {:?}", r.control()))?;
    let want = vec![((X, 0), vec![vec![B]]), ((Y, 0), vec![vec![B]]), ((Z, 2), vec![vec![E]])];
    ensure(cells(&r) == want, || format!("reset cells {:?}", cells(&r)))?;
    for c in [E, g, h] {
        ensure(t.reset(c).is_err(), || format!("reset at uncovered chip {c}"))?;
    }

    // populating the empty zero cells adds empty stacks there
    let empty = r.empty_zero_cells();
    ensure(empty == BTreeSet::from([W, Z]), || format!("empty zero cells {empty:?}"))?;
    let p = r.populate(&BTreeSet::from([W, X])).map_err(|e| e.to_string())?;
    ensure(p.control() == r.control(), || "populate changed the control".into())?;
    let want = vec![
        ((W, 0), vec![vec![]]),
        ((X, 0), vec![vec![], vec![B]]),
        ((Y, 0), vec![vec![B]]),
        ((Z, 2), vec![vec![E]]),
    ];
    ensure(cells(&p) == want, || format!("populated cells {:?}", cells(&p)))?;
    Ok("successor, thin, reset and populate match".into())
}

// ------------------------------------------------------- random lassos

struct Case {
    alg: ActivationAlgebra,
    objs: Vec<Obj>,
    letters: Vec<TraceMorphism>,
    prefix: Vec<usize>,
    lp: Vec<usize>,
}

fn random_morphism(rng: &mut StdRng, alg: &ActivationAlgebra, d: Obj, c: Obj) -> TraceMorphism {
    let n = rng.gen_range(0..=4);
    let ts: Vec<_> = (0..n)
        .map(|_| (rng.gen_range(0..d.size), Elem(rng.gen_range(0..alg.len() as u8)), rng.gen_range(0..c.size)))
        .collect();
    TraceMorphism::new(alg, d, c, ts).unwrap()
}

/// At most six letters over one or two objects of size at most three, a
/// prefix of at most three and a loop of at most four letters.
fn random_case(rng: &mut StdRng) -> Case {
    let alg = if rng.gen() { ActivationAlgebra::failure() } else { ActivationAlgebra::boolean() };
    let objs: Vec<Obj> = (0..rng.gen_range(1..=2)).map(|i| Obj::new(i, rng.gen_range(1..=3))).collect();
    let n = objs.len();
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    while pairs.len() < 6 && rng.gen_bool(0.7) {
        pairs.push((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    let letters: Vec<TraceMorphism> = pairs.iter().map(|&(d, c)| random_morphism(rng, &alg, objs[d], objs[c])).collect();
    let from = |rng: &mut StdRng, at: usize, to: Option<usize>| {
        let opts: Vec<usize> = (0..letters.len())
            .filter(|&l| letters[l].dom() == objs[at] && to.is_none_or(|t| letters[l].cod() == objs[t]))
            .collect();
        opts[rng.gen_range(0..opts.len())]
    };
    let idx = |o: Obj| objs.iter().position(|&p| p == o).unwrap();
    let mut at = 0;
    let mut prefix = Vec::new();
    for _ in 0..rng.gen_range(0..=3) {
        let l = from(rng, at, None);
        prefix.push(l);
        at = idx(letters[l].cod());
    }
    let start = at;
    let len = rng.gen_range(1..=4);
    let mut lp = Vec::new();
    for i in 0..len {
        let l = if i + 1 == len { from(rng, at, Some(start)) } else { from(rng, at, None) };
        lp.push(l);
        at = idx(letters[l].cod());
    }
    Case { alg, objs, letters, prefix, lp }
}

/// Some trace through the loop has infinitely many blocks of join alpha iff
/// some power of the loop composite has a triple `(x, alpha, x)`.
fn loop_power_oracle(alg: &ActivationAlgebra, lp: &[TraceMorphism]) -> bool {
    let whole = lp[1..].iter().try_fold(lp[0].clone(), |acc, m| compose(alg, &acc, m)).unwrap();
    let mut seen = BTreeSet::new();
    let mut power = whole.clone();
    while seen.insert(power.triples().to_vec()) {
        if power.triples().iter().any(|&(x, a, y)| x == y && a == alg.alpha()) {
            return true;
        }
        power = compose(alg, &power, &whole).unwrap();
    }
    false
}

const CASES: usize = 1500;

fn omega_equivalence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5afa);
    let mut accepted = 0;
    for i in 0..CASES {
        let c = random_case(&mut rng);
        let buchi = build_buchi(&c.alg, c.letters.clone());
        let rabin = build_safra_automaton(&c.alg, &c.objs.iter().copied().collect(), c.letters.clone(), c.letters[c.prefix.first().copied().unwrap_or(c.lp[0])].dom())
            .map_err(|e| e.to_string())?;
        let lp: Vec<TraceMorphism> = c.lp.iter().map(|&l| c.letters[l].clone()).collect();
        let want = loop_power_oracle(&c.alg, &lp);
        let b = buchi.accepts_lasso(&c.prefix, &c.lp).map_err(|e| e.to_string())?;
        let r = rabin.accepts_lasso(&c.prefix, &c.lp).map_err(|e| e.to_string())?;
        ensure(b == want && r == want, || format!("case {i}: buchi {b}, rabin {r}, oracle {want}"))?;
        accepted += want as usize;
    }
    Ok(format!("{CASES} lassos, {accepted} accepted, no disagreement"))
}

fn sparseness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5afa);
    let mut steps = 0;
    for i in 0..CASES {
        let c = random_case(&mut rng);
        let k = c.objs.iter().map(|o| o.size).max().unwrap();
        let a = c.alg.len() as u32;
        let start = c.letters[c.prefix.first().copied().unwrap_or(c.lp[0])].dom();
        let rabin = build_safra_automaton(&c.alg, &c.objs.iter().copied().collect(), c.letters.clone(), start)
            .map_err(|e| e.to_string())?;
        ensure(rabin.k() == k, || format!("case {i}: K = {}", rabin.k()))?;
        ensure(rabin.pair_count() == k * (a + 1), || format!("case {i}: {} pairs", rabin.pair_count()))?;
        let mut b = SafraBoard::empty(start);
        let word = c.prefix.iter().chain(c.lp.iter().cycle().take(3 * c.lp.len()));
        for &l in word {
            b = greedy_next(&c.alg, &b, &c.letters[l], k).map_err(|e| e.to_string())?;
            steps += 1;
            let ctl = b.control();
            ensure(ctl.len() as u32 <= k * a, || format!("case {i}: |control| = {}", ctl.len()))?;
            ensure(ctl.iter().all(|&g| g < supply_size(&c.alg, k)), || format!("case {i}: chip outside the supply"))?;
            for (&(_, e), ss) in b.sigma() {
                ensure(ss.len() <= 1, || format!("case {i}: {} stacks in a cell", ss.len()))?;
                ensure(e != c.alg.alpha() || ss.is_empty(), || format!("case {i}: stack on an alpha cell"))?;
            }
        }
    }
    Ok(format!("{steps} greedy steps over {CASES} runs, no violation"))
}

// ---------------------------------------------------------------- corpus

fn corpus() -> Vec<CorpusEntry> {
    let mut v = all();
    v.extend(mu_entries(MuTraces::Boolean));
    v
}

fn reset_of(c: &CorpusEntry) -> Result<ResetPreproof, String> {
    let (iota, p) = (&c.compiled.iota, &c.compiled.proof);
    let an = annotate(p, iota, default_k(p, iota), None).map_err(|e| format!("{}: {e}", c.name))?;
    expand(&an.proof).map_err(|e| format!("{}: {e}", c.name))
}

fn soundness_round_trip() -> Outcome {
    let mut kinds = BTreeMap::new();
    let mut n = 0;
    for c in corpus().into_iter().filter(|c| c.expect_proof) {
        let (sys, iota) = (&c.compiled.system, &c.compiled.iota);
        let rp = reset_of(&c)?;
        let v = check_reset_condition(sys, iota, &rp).map_err(|e| format!("{}: {e}", c.name))?;
        ensure(v.is_proof(), || format!("{}: reset condition fails", c.name))?;
        let s = strip(sys, &rp).map_err(|e| format!("{}: {e}", c.name))?;
        let g = check_gtc(&s, iota).map_err(|e| format!("{}: {e}", c.name))?;
        ensure(g.is_proof(), || format!("{}: stripped proof fails the trace condition", c.name))?;
        let kind = match c.tag {
            InstanceTag::Generic => "generic",
            InstanceTag::Cgt => "cgt",
            InstanceTag::Mu(_) => "mu",
        };
        *kinds.entry(kind).or_insert(0) += 1;
        n += 1;
    }
    ensure(n >= 15 && kinds.len() == 3, || format!("only {n} proofs ({kinds:?})"))?;
    Ok(format!("{n} proofs {kinds:?}"))
}

fn completeness(name: &str) -> Outcome {
    let c = all().into_iter().find(|c| c.name == name).ok_or(format!("no corpus entry {name}"))?;
    let (iota, p) = (&c.compiled.iota, &c.compiled.proof);
    let an = annotate(p, iota, default_k(p, iota), None).map_err(|e| e.to_string())?;
    let r = &an.report;
    ensure(r.depth <= r.bound(), || format!("depth {} over bound {}", r.depth, r.bound()))?;
    let rp = expand(&an.proof).map_err(|e| e.to_string())?;
    let q = strip(&c.compiled.system, &rp).map_err(|e| e.to_string())?;
    ensure(q == strip_search(&an.proof), || "strip of the expansion differs from the search proof".into())?;
    let steps = unfolding_sequence(p, &q, 100_000).ok_or("no unfolding sequence found")?;
    let replay = replay_unfolding(p, &steps).map_err(|e| e.to_string())?;
    ensure(replay == q, || "replayed unfolding differs".into())?;
    Ok(format!("{name}: depth {} <= {}, {} unfold steps", r.depth, r.bound(), steps.len()))
}

fn completeness_all() -> Outcome {
    let mut out = Vec::new();
    for name in ["cond-loop", "nu-box", "alternation"] {
        out.push(timed(Duration::from_secs(10), || completeness(name))?);
    }
    Ok(out.join("; "))
}

fn interpretation_agreement() -> Outcome {
    let f = mu_entries(MuTraces::Failure);
    let b = mu_entries(MuTraces::Boolean);
    let mut non = 0;
    for (x, y) in f.iter().zip(&b) {
        let vf = check_gtc(&x.compiled.proof, &x.compiled.iota).map_err(|e| e.to_string())?.is_proof();
        let vb = check_gtc(&y.compiled.proof, &y.compiled.iota).map_err(|e| e.to_string())?.is_proof();
        ensure(vf == vb, || format!("{}: failure {vf}, boolean {vb}", x.name))?;
        ensure(vf == x.expect_proof, || format!("{}: unexpected verdict {vf}", x.name))?;
        non += !vf as usize;
    }
    ensure(f.len() >= 10 && non >= 3, || format!("{} preproofs, {non} non-proofs", f.len()))?;
    Ok(format!("{} preproofs, {non} non-proofs, all agree", f.len()))
}

fn checker_cross_validation() -> Outcome {
    let mut n = 0;
    for c in corpus().into_iter().filter(|c| c.compiled.proof.len() <= 30) {
        let (iota, p) = (&c.compiled.iota, &c.compiled.proof);
        let a = check_gtc(p, iota).map_err(|e| e.to_string())?;
        let b = check_gtc_oracle(p, iota, 12).map_err(|e| e.to_string())?;
        ensure(a.is_proof() == b.is_proof(), || format!("{}: product {}, oracle {}", c.name, a.is_proof(), b.is_proof()))?;
        if let Verdict::Counterexample(_) = a {
            ensure(!c.expect_proof, || format!("{}: counterexample for a proof", c.name))?;
        }
        n += 1;
    }
    Ok(format!("{n} preproofs agree"))
}

// -------------------------------------------------------------- locality

/// Inserts a weakening that keeps everything above the subtree rooted at
/// `u`, shifting that subtree one level up.
fn graft_weak(rp: &ResetPreproof, u: &Address) -> ResetPreproof {
    let mut nodes = BTreeMap::new();
    for (a, n) in rp.nodes() {
        match a.strip_prefix(u) {
            Some(rest) => {
                nodes.insert(u.child(1).concat(&rest), n.clone());
            }
            None => {
                nodes.insert(a.clone(), n.clone());
            }
        }
    }
    let label = rp.label(u).clone();
    nodes.insert(u.clone(), Node { label, rule: Some(StepKind::Weak) });
    Preproof::from_parts(nodes, rp.beta().clone())
}

fn locality() -> Outcome {
    let mut checked = 0;
    for c in corpus().into_iter().filter(|c| c.expect_proof) {
        let (sys, iota) = (&c.compiled.system, &c.compiled.iota);
        let rp = reset_of(&c)?;
        let segments: BTreeSet<Address> = rp.buds().flat_map(|t| rp.segment(t)).collect();
        // the largest subtree holding no bud lies off every segment
        let off = rp
            .nodes()
            .keys()
            .filter(|a| rp.rule(a).is_some() && !rp.buds().any(|t| a.is_prefix_of(t)))
            .min_by_key(|a| a.len());
        let Some(u) = off.cloned() else { continue };
        let mut seen = BTreeSet::new();
        let before = reset_condition_traced(&rp, |a| {
            seen.insert(a.clone());
        });
        ensure(seen.is_subset(&segments), || format!("{}: checker read a node off the segments", c.name))?;
        let mut g = rp.clone();
        for _ in 0..3 {
            g = graft_weak(&g, &u);
        }
        let v = check_reset_condition(sys, iota, &g).map_err(|e| format!("{}: {e}", c.name))?;
        ensure(v == before, || format!("{}: verdict changed after grafting at {u}", c.name))?;
        let mut seen2 = BTreeSet::new();
        reset_condition_traced(&g, |a| {
            seen2.insert(a.clone());
        });
        ensure(seen2 == seen, || format!("{}: the graft changed the nodes read", c.name))?;
        ensure(!seen2.contains(&u), || format!("{}: graft site was read", c.name))?;
        checked += 1;
    }
    ensure(checked >= 10, || format!("only {checked} proofs had an off-cycle subtree"))?;
    Ok(format!("{checked} grafted proofs, verdicts and read sets unchanged"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("figure vectors", || timed(Duration::from_secs(1), figures)),
        ("omega equivalence", || timed(Duration::from_secs(60), omega_equivalence)),
        ("sparseness and size bounds", sparseness),
        ("soundness round trip", soundness_round_trip),
        ("completeness at desk scale", completeness_all),
        ("interpretation agreement", interpretation_agreement),
        ("checker cross-validation", checker_cross_validation),
        ("locality of the reset condition", locality),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match r {
            Ok(d) => println!("criterion {} {name}: PASS ({d})", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({e})", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
