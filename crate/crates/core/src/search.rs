//! The proof-search system: greedy board annotation of a proof, expansion
//! into the reset system, and checking that a result is an unfolding.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;

use crate::board::{greedy_next, greedy_step, BoardError, Chip, SafraBoard, Transcript, TransitionKind};
use crate::gtc::{check_gtc, GtcError, TraceInterpretation};
use crate::proof::{Address, Node, Preproof, ProofError, Retarget, RuleId};
use crate::reset::{AnnotatedSequent, ResetPreproof, StepKind};

/// A lifted rule together with the greedy transcript of every premise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchStep {
    pub rule: RuleId,
    pub transcripts: Vec<Transcript>,
}

pub type SearchProof = Preproof<AnnotatedSequent, SearchStep>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("the input does not satisfy the trace condition")]
    GtcFails,
    #[error("no closure within depth {0}")]
    DepthExceeded(usize),
    #[error("invalid search proof at {0}")]
    InvalidSearchProof(Address),
    #[error(transparent)]
    Gtc(#[from] GtcError),
    #[error(transparent)]
    Board(#[from] BoardError),
}

#[derive(Clone, Debug)]
pub struct Annotated {
    pub proof: SearchProof,
    /// Node of the input each output node copies.
    pub origin: BTreeMap<Address, Address>,
    pub report: AnnotateReport,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotateReport {
    pub input_nodes: usize,
    pub output_nodes: usize,
    pub depth: usize,
    /// Reachable `(node, board)` pairs of the greedy product.
    pub product_states: usize,
    /// Distinct boards among them.
    pub reachable_boards: usize,
    pub closures: usize,
}

impl AnnotateReport {
    /// `|nodes| · |reachable boards|`
    pub fn bound(&self) -> usize {
        self.input_nodes * self.reachable_boards
    }
}

/// Reachable pairs of (input node, board), stepping greedily along
/// child edges and jumping through buds.
fn reachable(p: &Preproof, iota: &TraceInterpretation, k: u32) -> Result<BTreeSet<(Address, SafraBoard)>, SearchError> {
    let alg = &iota.algebra;
    let start = (Address::root(), SafraBoard::empty(iota.object(*p.endsequent()).unwrap()));
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some((t, b)) = queue.pop_front() {
        let Some(r) = p.rule(&t).copied() else { continue };
        for (c, tau) in p.children(&t).into_iter().zip(iota.maps(r).unwrap()) {
            let nb = greedy_next(alg, &b, tau, k)?;
            let eff = p.companion(&c).cloned().unwrap_or(c);
            if seen.insert((eff.clone(), nb.clone())) {
                queue.push_back((eff, nb));
            }
        }
    }
    Ok(seen)
}

/// Decorates a proof with greedy boards, unfolding it until every branch
/// returns to an earlier `(node, board)` pair when it crosses a back-edge.
///
/// Premises are explored left to right; a closure targets the nearest
/// matching ancestor.
pub fn annotate(p: &Preproof, iota: &TraceInterpretation, k: u32, max_depth: Option<usize>) -> Result<Annotated, SearchError> {
    if !check_gtc(p, iota)?.is_proof() {
        return Err(SearchError::GtcFails);
    }
    let alg = &iota.algebra;
    let states = reachable(p, iota, k)?;
    let boards: BTreeSet<&SafraBoard> = states.iter().map(|(_, b)| b).collect();
    let height = p.nodes().keys().map(|a| a.len()).max().unwrap_or(0) + 1;
    let limit = max_depth.unwrap_or(height * (states.len() + 1) + 1);

    let mut nodes = BTreeMap::new();
    let mut beta = BTreeMap::new();
    let mut origin = BTreeMap::new();
    let mut depth = 0;
    // (output address, input node, board, crossed a back-edge)
    let root_board = SafraBoard::empty(iota.object(*p.endsequent()).unwrap());
    let mut stack = Vec::from([(Address::root(), Address::root(), root_board, false)]);
    while let Some((a, t, b, crossed)) = stack.pop() {
        depth = depth.max(a.len());
        if a.len() > limit {
            return Err(SearchError::DepthExceeded(limit));
        }
        let label = AnnotatedSequent { base: *p.label(&t), board: b.clone() };
        if crossed {
            let target = (0..a.len()).rev().map(|j| Address(a.0[..j].to_vec())).find(|anc| {
                origin.get(anc) == Some(&t) && nodes.get(anc).is_some_and(|n: &Node<AnnotatedSequent, SearchStep>| n.label.board == b)
            });
            if let Some(c) = target {
                nodes.insert(a.clone(), Node { label, rule: None });
                origin.insert(a.clone(), t);
                beta.insert(a, c);
                continue;
            }
        }
        origin.insert(a.clone(), t.clone());
        let Some(r) = p.rule(&t).copied() else {
            nodes.insert(a, Node { label, rule: None });
            continue;
        };
        let ch = p.children(&t);
        let mut transcripts = Vec::with_capacity(ch.len());
        let mut next = Vec::with_capacity(ch.len());
        for (i, (c, tau)) in ch.iter().zip(iota.maps(r).unwrap()).enumerate() {
            let (nb, tr) = greedy_step(alg, &b, tau, k)?;
            transcripts.push(tr);
            let (eff, crossed) = match p.companion(c) {
                Some(cc) => (cc.clone(), true),
                None => (c.clone(), false),
            };
            next.push((a.child(i as u32 + 1), eff, nb, crossed));
        }
        nodes.insert(a, Node { label, rule: Some(SearchStep { rule: r, transcripts }) });
        stack.extend(next.into_iter().rev());
    }
    let closures = beta.len();
    let proof = Preproof::from_parts(nodes, beta);
    let report = AnnotateReport {
        input_nodes: p.len(),
        output_nodes: proof.len(),
        depth,
        product_states: states.len(),
        reachable_boards: boards.len(),
        closures,
    };
    Ok(Annotated { proof, origin, report })
}

/// Forgets the boards of a search proof.
pub fn strip_search(sp: &SearchProof) -> Preproof {
    sp.map_labels(|_, s| s.base, |_, st| st.rule)
}

/// The search condition on cycles: every bud segment keeps a chip in all
/// controls that some greedy step on the segment resets. Returns the chip
/// per bud, or the first failing bud.
pub fn check_search_condition(sp: &SearchProof) -> Result<BTreeMap<Address, Chip>, Address> {
    let mut out = BTreeMap::new();
    for t in sp.buds() {
        let seg = sp.segment(t);
        let controls: Vec<&[Chip]> = seg.iter().map(|a| sp.label(a).board.control()).collect();
        let mut n = controls[0].len();
        for c in &controls {
            n = n.min(controls[0].iter().zip(c.iter()).take_while(|(x, y)| x == y).count());
        }
        let theta = &controls[0][..n];
        let reset: BTreeSet<Chip> =
            seg.iter().filter_map(|a| sp.rule(a)).flat_map(|s| s.transcripts.iter().flat_map(|t| t.resets())).collect();
        match theta.iter().rev().find(|g| reset.contains(g)) {
            Some(g) => {
                out.insert(t.clone(), *g);
            }
            None => return Err(t.clone()),
        }
    }
    Ok(out)
}

/// Replaces each search step by its reset-system gadget: resets of the
/// covered chips, a pop, the lifted rule, and a weakening per premise that
/// undoes thinning. Steps that would change nothing are left out.
pub fn expand(sp: &SearchProof) -> Result<ResetPreproof, SearchError> {
    let mut nodes: BTreeMap<Address, Node<AnnotatedSequent, StepKind>> = BTreeMap::new();
    let mut top: BTreeMap<Address, Address> = BTreeMap::new();
    let mut stack = Vec::from([(Address::root(), Address::root())]);
    while let Some((s, e)) = stack.pop() {
        top.insert(s.clone(), e.clone());
        let n = &sp.nodes()[&s];
        let Some(step) = &n.rule else {
            nodes.insert(e, Node { label: n.label.clone(), rule: None });
            continue;
        };
        let bad = || SearchError::InvalidSearchProof(s.clone());
        let base = n.label.base;
        let mut cur = e;
        let mut push = |cur: &mut Address, board: SafraBoard, kind: StepKind| {
            nodes.insert(cur.clone(), Node { label: AnnotatedSequent { base, board }, rule: Some(kind) });
            *cur = cur.child(1);
        };
        let children = sp.children(&s);
        if children.len() != step.transcripts.len() {
            return Err(bad());
        }
        let mut board = n.label.board.clone();
        if let Some(tr) = step.transcripts.first() {
            for st in &tr.steps {
                match st.kind {
                    TransitionKind::Reset(g) => {
                        push(&mut cur, st.before.clone(), StepKind::Reset(g));
                        board = st.after.clone();
                    }
                    TransitionKind::Pop => {
                        push(&mut cur, st.before.clone(), StepKind::Pop);
                        board = st.after.clone();
                    }
                    _ => {}
                }
            }
        }
        nodes.insert(cur.clone(), Node { label: AnnotatedSequent { base, board: board.clone() }, rule: Some(StepKind::Lifted(step.rule)) });
        for (i, (c, tr)) in children.iter().zip(&step.transcripts).enumerate() {
            let tau = tr.find(&TransitionKind::Tau).ok_or_else(bad)?;
            let thin = tr.find(&TransitionKind::Thin).ok_or_else(bad)?;
            if tau.before != board || thin.after != sp.label(c).board {
                return Err(bad());
            }
            let cb = sp.label(c).base;
            let mut a = cur.child(i as u32 + 1);
            if thin.before != thin.after {
                nodes.insert(a.clone(), Node { label: AnnotatedSequent { base: cb, board: thin.before.clone() }, rule: Some(StepKind::Weak) });
                a = a.child(1);
            }
            stack.push((c.clone(), a));
        }
    }
    let beta = sp.beta().iter().map(|(t, c)| (top[t].clone(), top[c].clone())).collect();
    Ok(Preproof::from_parts(nodes, beta))
}

/// One replayable unfolding: the bud and the retargeting of every
/// ambiguous copy (see [`Preproof::unfold_at_with`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnfoldStep {
    pub bud: Address,
    pub choice: BTreeMap<Address, Retarget>,
}

/// Searches for a sequence of unfolding steps turning `p` into `q`. Gives
/// up after `max_states` intermediate preproofs.
pub fn unfolding_sequence<S: Clone + Ord, R: Clone + Ord>(
    p: &Preproof<S, R>,
    q: &Preproof<S, R>,
    max_states: usize,
) -> Option<Vec<UnfoldStep>> {
    type Key<S, R> = (Vec<(Address, S, Option<R>)>, Vec<(Address, Address)>);
    fn key<S: Clone + Eq, R: Clone>(p: &Preproof<S, R>) -> Key<S, R> {
        (
            p.nodes().iter().map(|(a, n)| (a.clone(), n.label.clone(), n.rule.clone())).collect(),
            p.beta().iter().map(|(a, b)| (a.clone(), b.clone())).collect(),
        )
    }
    // cur can still grow into q
    fn fits<S: Eq + Clone, R: Eq + Clone>(cur: &Preproof<S, R>, q: &Preproof<S, R>) -> bool {
        cur.nodes().iter().all(|(a, n)| {
            let Some(m) = q.node(a) else { return false };
            if m.label != n.label {
                return false;
            }
            match cur.companion(a) {
                Some(c) => match q.companion(a) {
                    Some(c2) => c == c2,
                    None => m.rule.is_some(),
                },
                None => n.rule == m.rule && (n.rule.is_some() || !q.is_bud(a)),
            }
        })
    }
    let mut seen = BTreeSet::new();
    let mut stack = Vec::from([(p.clone(), Vec::new())]);
    while let Some((cur, path)) = stack.pop() {
        if cur == *q {
            return Some(path);
        }
        if !fits(&cur, q) || !seen.insert(key(&cur)) || seen.len() > max_states {
            continue;
        }
        // unfoldings at different buds commute up to renaming, so only the
        // first pending bud is branched on
        let Some(t) = cur.buds().find(|t| q.rule(t).is_some()).cloned() else { continue };
        let c = cur.companion(&t).unwrap().clone();
        // copies already tied in q are forced; the rest are branched on
        let mut choices = Vec::from([BTreeMap::new()]);
        for a in cur.ambiguous_copies(&t).unwrap() {
            let u = a.strip_prefix(&t).unwrap();
            let w = cur.companion(&c.concat(&u)).unwrap();
            let copy = t.concat(&w.strip_prefix(&c).unwrap());
            let opts: &[Retarget] = match q.companion(&a) {
                Some(x) if x == w => &[Retarget::OldCompanion],
                Some(x) if *x == copy => &[Retarget::NewBud],
                Some(_) => &[],
                None => &[Retarget::OldCompanion, Retarget::NewBud],
            };
            choices = choices
                .into_iter()
                .flat_map(|m| {
                    let a = &a;
                    opts.iter().map(move |&o| {
                        let mut m = m.clone();
                        m.insert(a.clone(), o);
                        m
                    })
                })
                .collect();
        }
        for choice in choices {
            if let Ok(next) = cur.unfold_at_with(&t, &choice) {
                let mut path2 = path.clone();
                path2.push(UnfoldStep { bud: t.clone(), choice });
                stack.push((next, path2));
            }
        }
    }
    None
}

/// Applies the steps found by [`unfolding_sequence`].
pub fn replay_unfolding<S: Clone + Eq, R: Clone>(p: &Preproof<S, R>, steps: &[UnfoldStep]) -> Result<Preproof<S, R>, ProofError> {
    steps.iter().try_fold(p.clone(), |cur, st| cur.unfold_at_with(&st.bud, &st.choice))
}

/// Whether `q` and `p` unravel to the same infinite tree.
pub fn same_unravelling<S: Clone + Eq, R: Clone + Eq>(p: &Preproof<S, R>, q: &Preproof<S, R>) -> bool {
    let follow = |x: &Preproof<S, R>, a: &Address| x.companion(a).cloned().unwrap_or_else(|| a.clone());
    let mut seen = BTreeSet::new();
    let mut stack = Vec::from([(Address::root(), Address::root())]);
    while let Some((a, b)) = stack.pop() {
        let (a, b) = (follow(p, &a), follow(q, &b));
        if !seen.insert((a.clone(), b.clone())) {
            continue;
        }
        let (n, m) = (&p.nodes()[&a], &q.nodes()[&b]);
        if n.label != m.label || n.rule != m.rule {
            return false;
        }
        let (ca, cb) = (p.children(&a), q.children(&b));
        if ca.len() != cb.len() {
            return false;
        }
        stack.extend(ca.into_iter().zip(cb));
    }
    true
}

/// Whether the annotation's run matches the search proof: every premise
/// board is the greedy successor of its conclusion board.
pub fn validate_search_proof(sp: &SearchProof, iota: &TraceInterpretation, k: u32) -> Result<(), SearchError> {
    sp.validate_structure().map_err(|v| SearchError::InvalidSearchProof(v.address))?;
    for (a, n) in sp.nodes() {
        let Some(step) = &n.rule else { continue };
        let maps = iota.maps(step.rule).ok_or_else(|| SearchError::InvalidSearchProof(a.clone()))?;
        let ch = sp.children(a);
        if maps.len() != ch.len() {
            return Err(SearchError::InvalidSearchProof(a.clone()));
        }
        for ((c, tau), tr) in ch.iter().zip(maps).zip(&step.transcripts) {
            let (nb, t) = greedy_step(&iota.algebra, &n.label.board, tau, k)?;
            if nb != sp.label(c).board || t != *tr {
                return Err(SearchError::InvalidSearchProof(c.clone()));
            }
        }
    }
    Ok(())
}

/// Annotates, expands and strips; the usual round trip.
pub fn round_trip(p: &Preproof, iota: &TraceInterpretation, k: u32) -> Result<(Annotated, ResetPreproof), SearchError> {
    let a = annotate(p, iota, k, None)?;
    let r = expand(&a.proof)?;
    Ok((a, r))
}

/// `K`: the largest trace object of the proof.
pub fn default_k(p: &Preproof, iota: &TraceInterpretation) -> u32 {
    p.nodes().values().map(|n| iota.object(n.label).map_or(0, |o| o.size)).max().unwrap_or(0).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ActivationAlgebra, Elem};
    use crate::proof::DerivationSystem;
    use crate::reset::{check_reset_condition, strip};
    use crate::trace::{TraceMorphism, TraceObject};
    use alloc::string::ToString;
    use alloc::vec;

    /// `A --r--> B --s--> A(bud)` with progress on `r`.
    fn two_node(alg: ActivationAlgebra) -> (DerivationSystem, TraceInterpretation, Preproof) {
        let mut sys = DerivationSystem::new();
        let a = sys.sequent("A");
        let b = sys.sequent("B");
        let r = sys.rule("r", a, vec![b]);
        let s = sys.rule("s", b, vec![a]);
        let mut iota = TraceInterpretation::new(alg.clone());
        iota.set_object(a, TraceObject::new(0, vec!["a".to_string()]));
        iota.set_object(b, TraceObject::new(1, vec!["b".to_string()]));
        let (oa, ob) = (iota.object(a).unwrap(), iota.object(b).unwrap());
        iota.set_maps(r, vec![TraceMorphism::new(&alg, oa, ob, [(0, Elem(1), 0)]).unwrap()]);
        iota.set_maps(s, vec![TraceMorphism::new(&alg, ob, oa, [(0, Elem(0), 0)]).unwrap()]);
        let nodes = BTreeMap::from([
            (Address::root(), Node { label: a, rule: Some(r) }),
            (Address(vec![1]), Node { label: b, rule: Some(s) }),
            (Address(vec![1, 1]), Node { label: a, rule: None }),
        ]);
        let p = Preproof::from_parts(nodes, BTreeMap::from([(Address(vec![1, 1]), Address::root())]));
        (sys, iota, p)
    }

    #[test]
    fn greedy_run_by_hand() {
        // ε: empty board; r pops and covers the progressing ∅ with chip 0
        // 1: [0] {0}; s only moves it
        // 1.1: [0] {0} at the root again, but the root had the empty board
        // 1.1.1: r covers again with fresh chip 1, giving [0 1] {0 1}
        // 1.1.1.1: s resets the covered chip 0, back to [0] {0}: close at 1.1
        let (sys, iota, p) = two_node(ActivationAlgebra::boolean());
        let an = annotate(&p, &iota, 1, None).unwrap();
        let sp = &an.proof;
        let ctl = |s: &str| sp.label(&Address::parse(s).unwrap()).board.control().to_vec();
        assert_eq!(ctl(""), Vec::<Chip>::new());
        assert_eq!(ctl("1"), vec![0]);
        assert_eq!(ctl("1.1"), vec![0]);
        assert_eq!(ctl("1.1.1"), vec![0, 1]);
        assert_eq!(ctl("1.1.1.1"), vec![0]);
        assert_eq!(sp.beta().get(&Address::parse("1.1.1.1").unwrap()), Some(&Address::parse("1.1").unwrap()));
        assert_eq!(check_search_condition(sp).unwrap().values().copied().collect::<Vec<_>>(), vec![0]);
        validate_search_proof(sp, &iota, 1).unwrap();
        assert!(an.report.depth <= an.report.bound());

        let rp = expand(sp).unwrap();
        assert!(check_reset_condition(&sys, &iota, &rp).unwrap().is_proof());
        let back = strip(&sys, &rp).unwrap();
        assert_eq!(back, strip_search(sp));
        assert!(same_unravelling(&p, &back));
        let seq = unfolding_sequence(&p, &back, 10_000).unwrap();
        assert!(!seq.is_empty());
    }

    #[test]
    fn finite_proof_needs_no_closure() {
        let alg = ActivationAlgebra::boolean();
        let mut sys = DerivationSystem::new();
        let a = sys.sequent("A");
        let ax = sys.rule("ax", a, vec![]);
        let mut iota = TraceInterpretation::new(alg);
        iota.set_object(a, TraceObject::new(0, vec!["a".to_string()]));
        iota.set_maps(ax, vec![]);
        let p = Preproof::single_step(a, ax, vec![]);
        let an = annotate(&p, &iota, 1, None).unwrap();
        assert_eq!(an.proof.len(), 1);
        assert_eq!(an.report.closures, 0);
        let rp = expand(&an.proof).unwrap();
        assert_eq!(rp.len(), 1);
        assert_eq!(strip(&sys, &rp).unwrap(), p);
    }

    #[test]
    fn failing_input_rejected() {
        let (_, mut iota, p) = two_node(ActivationAlgebra::boolean());
        let r = *p.rule(&Address::root()).unwrap();
        let o = iota.object(*p.endsequent()).unwrap();
        let ob = iota.maps(r).unwrap()[0].cod();
        let alg = iota.algebra.clone();
        iota.set_maps(r, vec![TraceMorphism::new(&alg, o, ob, [(0, Elem(0), 0)]).unwrap()]);
        assert!(matches!(annotate(&p, &iota, 1, None), Err(SearchError::GtcFails)));
    }

    #[test]
    fn depth_cap() {
        let (_, iota, p) = two_node(ActivationAlgebra::failure());
        assert!(matches!(annotate(&p, &iota, 1, Some(1)), Err(SearchError::DepthExceeded(1))));
    }

    #[test]
    fn unfolding_search_rejects_non_unfoldings() {
        let (_, _, p) = two_node(ActivationAlgebra::boolean());
        let q = p.unfold_at(&Address(vec![1, 1]), Retarget::NewBud).unwrap();
        let steps = unfolding_sequence(&p, &q, 100).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(replay_unfolding(&p, &steps).unwrap(), q);
        assert_eq!(unfolding_sequence(&q, &p, 100), None);
        assert!(same_unravelling(&p, &q));
    }
}
