use std::collections::BTreeSet;

use proptest::prelude::*;
use resetproof_core::automata::{build_buchi, build_safra_automaton};
use resetproof_core::board::supply_size;
use resetproof_core::trace::compose;
use resetproof_core::{ActivationAlgebra, Elem, Obj, TraceMorphism};

/// Some trace through `lp^ω` splits into infinitely many blocks of join `α`
/// iff `(x, α, x)` lies in some power of the loop composite.
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

#[derive(Debug, Clone)]
struct Case {
    failure: bool,
    sizes: Vec<u32>,
    // (dom, cod, triples)
    letters: Vec<(usize, usize, Vec<(u32, u8, u32)>)>,
    prefix: Vec<usize>,
    lp: Vec<usize>,
}

fn arb_case() -> impl Strategy<Value = Case> {
    (any::<bool>(), prop::collection::vec(1u32..=3, 1..=2)).prop_flat_map(|(failure, sizes)| {
        let n = sizes.len();
        let labels = if failure { 3u8 } else { 2 };
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        let letter = |(d, c): (usize, usize), sd: u32, sc: u32| {
            prop::collection::vec((0..sd, 0..labels, 0..sc), 0..=4).prop_map(move |t| (d, c, t))
        };
        let letters: Vec<_> = pairs
            .iter()
            .flat_map(|&(d, c)| [letter((d, c), sizes[d], sizes[c]), letter((d, c), sizes[d], sizes[c])])
            .collect();
        (Just(failure), Just(sizes), letters, prop::collection::vec(any::<prop::sample::Index>(), 0..4), prop::collection::vec(any::<prop::sample::Index>(), 1..5))
            .prop_map(|(failure, sizes, letters, pre, lp)| {
                // walk from object 0; pick letters whose domain matches
                let pick = |at: usize, ix: &prop::sample::Index| {
                    let opts: Vec<usize> = (0..letters.len()).filter(|&l| letters[l].0 == at).collect();
                    opts[ix.index(opts.len())]
                };
                let mut at = 0;
                let mut prefix = Vec::new();
                for ix in &pre {
                    let l = pick(at, ix);
                    prefix.push(l);
                    at = letters[l].1;
                }
                let start = at;
                let mut lpw = Vec::new();
                for ix in &lp {
                    let l = pick(at, ix);
                    lpw.push(l);
                    at = letters[l].1;
                }
                if at != start {
                    let l = (0..letters.len()).find(|&l| letters[l].0 == at && letters[l].1 == start).unwrap();
                    lpw.push(l);
                }
                Case { failure, sizes, letters, prefix, lp: lpw }
            })
    })
}

fn materialize(c: &Case) -> (ActivationAlgebra, Vec<Obj>, Vec<TraceMorphism>) {
    let alg = if c.failure { ActivationAlgebra::failure() } else { ActivationAlgebra::boolean() };
    let objs: Vec<Obj> = c.sizes.iter().enumerate().map(|(i, &s)| Obj::new(i as u32, s)).collect();
    let ms = c
        .letters
        .iter()
        .map(|(d, k, t)| TraceMorphism::new(&alg, objs[*d], objs[*k], t.iter().map(|&(x, a, y)| (x, Elem(a), y))).unwrap())
        .collect();
    (alg, objs, ms)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn buchi_rabin_and_oracle_agree(c in arb_case()) {
        let (alg, objs, ms) = materialize(&c);
        let buchi = build_buchi(&alg, ms.clone());
        let rabin = build_safra_automaton(&alg, &objs.iter().copied().collect(), ms.clone(), objs[0]).unwrap();
        let lp: Vec<TraceMorphism> = c.lp.iter().map(|&l| ms[l].clone()).collect();
        let expect = loop_power_oracle(&alg, &lp);
        prop_assert_eq!(buchi.accepts_lasso(&c.prefix, &c.lp).unwrap(), expect);
        prop_assert_eq!(rabin.accepts_lasso(&c.prefix, &c.lp).unwrap(), expect);
    }

    #[test]
    fn greedy_runs_stay_sparse(c in arb_case()) {
        let (alg, objs, ms) = materialize(&c);
        let rabin = build_safra_automaton(&alg, &objs.iter().copied().collect(), ms, objs[0]).unwrap();
        let k = rabin.k();
        prop_assert_eq!(rabin.pair_count(), supply_size(&alg, k));
        prop_assert_eq!(rabin.pair_count(), k * (alg.len() as u32 + 1));
        let mut q = rabin.start();
        for &l in c.prefix.iter().chain(c.lp.iter().cycle().take(4 * c.lp.len())) {
            q = rabin.step(q, l).unwrap().unwrap();
            prop_assert!(rabin.state(q).is_k_sparse(&alg, k));
        }
    }
}

#[test]
fn loop_power_oracle_examples() {
    let b = ActivationAlgebra::boolean();
    let f = ActivationAlgebra::failure();
    let x = Obj::new(0, 1);
    let m = |alg: &ActivationAlgebra, a: u8| TraceMorphism::new(alg, x, x, [(0, Elem(a), 0)]).unwrap();
    assert!(!loop_power_oracle(&b, &[TraceMorphism::identity(x)]));
    assert!(loop_power_oracle(&b, &[m(&b, 1)]));
    assert!(loop_power_oracle(&f, &[m(&f, 1), m(&f, 0)]));
    assert!(!loop_power_oracle(&f, &[m(&f, 1), m(&f, 2)]));
}
