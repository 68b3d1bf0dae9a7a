//! Trace interpretations and the global trace condition.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::algebra::ActivationAlgebra;
use crate::automata::{build_buchi, build_safra_automaton, RabinAutomaton};
use crate::proof::{scc, Address, DerivationSystem, NodeLasso, Preproof, PreproofViolation, RuleId, SequentId};
use crate::trace::{Obj, TraceMorphism, TraceObject};

/// `ι`: a trace object per sequent and one morphism per rule premise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceInterpretation {
    pub algebra: ActivationAlgebra,
    objects: BTreeMap<SequentId, TraceObject>,
    maps: BTreeMap<RuleId, Vec<TraceMorphism>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GtcError {
    #[error("open leaf at {0}")]
    OpenLeaves(Address),
    #[error("interpretation mismatch: {0}")]
    InterpretationMismatch(String),
    #[error(transparent)]
    Invalid(#[from] PreproofViolation),
}

impl TraceInterpretation {
    pub fn new(algebra: ActivationAlgebra) -> Self {
        TraceInterpretation { algebra, objects: BTreeMap::new(), maps: BTreeMap::new() }
    }

    pub fn set_object(&mut self, s: SequentId, obj: TraceObject) {
        self.objects.insert(s, obj);
    }

    pub fn set_maps(&mut self, r: RuleId, maps: Vec<TraceMorphism>) {
        self.maps.insert(r, maps);
    }

    pub fn object(&self, s: SequentId) -> Option<Obj> {
        self.objects.get(&s).map(|o| o.obj)
    }

    pub fn trace_object(&self, s: SequentId) -> Option<&TraceObject> {
        self.objects.get(&s)
    }

    pub fn maps(&self, r: RuleId) -> Option<&[TraceMorphism]> {
        self.maps.get(&r).map(|v| v.as_slice())
    }

    pub fn objects(&self) -> impl Iterator<Item = (SequentId, &TraceObject)> {
        self.objects.iter().map(|(k, v)| (*k, v))
    }

    pub fn all_maps(&self) -> impl Iterator<Item = (RuleId, &[TraceMorphism])> {
        self.maps.iter().map(|(k, v)| (*k, v.as_slice()))
    }

    /// Checks totality on `sys` and dom/cod alignment with `ρ`.
    pub fn validate(&self, sys: &DerivationSystem) -> Result<(), GtcError> {
        let mismatch = |s: String| Err(GtcError::InterpretationMismatch(s));
        let mut ids = BTreeMap::new();
        for o in self.objects.values() {
            if let Some(prev) = ids.insert(o.obj.id, o.obj) {
                if prev != o.obj {
                    return mismatch(format!("object id {} used with two sizes", o.obj.id));
                }
            }
        }
        for (s, _) in sys.sequents() {
            if !self.objects.contains_key(&s) {
                return mismatch(format!("no object for sequent {}", s.0));
            }
        }
        for (r, rule) in sys.rules() {
            let Some(ms) = self.maps.get(&r) else {
                return mismatch(format!("no maps for rule {}", r.0));
            };
            if ms.len() != rule.premises.len() {
                return mismatch(format!("rule {} has {} maps for {} premises", r.0, ms.len(), rule.premises.len()));
            }
            for (i, m) in ms.iter().enumerate() {
                if Some(m.dom()) != self.object(rule.conclusion) || Some(m.cod()) != self.object(rule.premises[i]) {
                    return mismatch(format!("map {} of rule {} has the wrong type", i + 1, r.0));
                }
            }
        }
        Ok(())
    }

    /// Checks the objects and maps used by `p` only.
    pub fn check_proof(&self, p: &Preproof) -> Result<(), GtcError> {
        for (a, n) in p.nodes() {
            let Some(obj) = self.object(n.label) else {
                return Err(GtcError::InterpretationMismatch(format!("no object for the sequent at {a}")));
            };
            let Some(r) = n.rule else { continue };
            let ch = p.children(a);
            let ok = self.maps(r).is_some_and(|ms| {
                ms.len() == ch.len()
                    && ms.iter().zip(&ch).all(|(m, c)| m.dom() == obj && Some(m.cod()) == self.object(*p.label(c)))
            });
            if !ok {
                return Err(GtcError::InterpretationMismatch(format!("maps of the rule at {a} do not fit")));
            }
        }
        Ok(())
    }
}

/// The morphism read along the proof-graph edge `u → v`.
pub fn edge_morphism(p: &Preproof, iota: &TraceInterpretation, u: &Address, v: &Address) -> TraceMorphism {
    if p.is_bud(u) {
        TraceMorphism::identity(iota.object(*p.label(u)).expect("checked interpretation"))
    } else {
        let j = *v.0.last().expect("child edge") as usize;
        iota.maps(p.rule(u).copied().expect("inner node")).expect("checked interpretation")[j - 1].clone()
    }
}

/// The morphism words read along a node lasso: identities at back-edges,
/// `r_j` at the j-th child.
pub fn induced_lasso(
    p: &Preproof,
    iota: &TraceInterpretation,
    lasso: &NodeLasso,
) -> (Vec<TraceMorphism>, Vec<TraceMorphism>) {
    let mut prefix = Vec::new();
    let mut walk: Vec<&Address> = lasso.prefix.iter().collect();
    walk.push(&lasso.cycle[0]);
    for w in walk.windows(2) {
        prefix.push(edge_morphism(p, iota, w[0], w[1]));
    }
    let n = lasso.cycle.len();
    let lp = (0..n).map(|i| edge_morphism(p, iota, &lasso.cycle[i], &lasso.cycle[(i + 1) % n])).collect();
    (prefix, lp)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Proof,
    Counterexample(NodeLasso),
}

impl Verdict {
    pub fn is_proof(&self) -> bool {
        matches!(self, Verdict::Proof)
    }
}

/// Deduplicated morphism alphabet with index lookup.
#[derive(Clone, Debug, Default)]
pub struct Letters {
    pub list: Vec<TraceMorphism>,
    index: BTreeMap<TraceMorphism, usize>,
}

impl Letters {
    pub fn add(&mut self, m: &TraceMorphism) -> usize {
        if let Some(&i) = self.index.get(m) {
            return i;
        }
        self.list.push(m.clone());
        self.index.insert(m.clone(), self.list.len() - 1);
        self.list.len() - 1
    }

    pub fn get(&self, m: &TraceMorphism) -> Option<usize> {
        self.index.get(m).copied()
    }
}

fn precheck(p: &Preproof, iota: &TraceInterpretation) -> Result<(), GtcError> {
    p.validate_structure()?;
    if let Some(o) = p.open_leaves().first() {
        return Err(GtcError::OpenLeaves(o.clone()));
    }
    iota.check_proof(p)
}

/// All letters a proof can read, identities for bud sequents included.
pub fn proof_letters(p: &Preproof, iota: &TraceInterpretation) -> Letters {
    let mut letters = Letters::default();
    for (a, n) in p.nodes() {
        if p.is_bud(a) {
            letters.add(&TraceMorphism::identity(iota.object(n.label).unwrap()));
        } else if let Some(r) = n.rule {
            for m in iota.maps(r).unwrap() {
                letters.add(m);
            }
        }
    }
    letters
}

/// The reachable part of the product of the proof graph with the Safra
/// automaton started at the root object.
pub struct Product {
    pub automaton: RabinAutomaton,
    pub letters: Letters,
    /// `(node, Safra state)`
    pub nodes: Vec<(Address, usize)>,
    pub succ: Vec<Vec<usize>>,
}

impl Product {
    pub fn build(p: &Preproof, iota: &TraceInterpretation) -> Result<Product, GtcError> {
        precheck(p, iota)?;
        let letters = proof_letters(p, iota);
        let objects: BTreeSet<Obj> = p.nodes().values().map(|n| iota.object(n.label).unwrap()).collect();
        let root = iota.object(*p.endsequent()).unwrap();
        let automaton = build_safra_automaton(&iota.algebra, &objects, letters.list.clone(), root)
            .map_err(|e| GtcError::InterpretationMismatch(format!("{e}")))?;
        let mut index: BTreeMap<(Address, usize), usize> = BTreeMap::new();
        let mut nodes = Vec::new();
        let mut succ: Vec<Vec<usize>> = Vec::new();
        let start = (Address::root(), automaton.start());
        index.insert(start.clone(), 0);
        nodes.push(start);
        succ.push(Vec::new());
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            let (t, q) = nodes[v].clone();
            for c in p.successors(&t) {
                let l = letters.get(&edge_morphism(p, iota, &t, &c)).unwrap();
                let q2 = automaton.step(q, l).unwrap().expect("edges chain objects");
                let key = (c, q2);
                let w = match index.get(&key) {
                    Some(&w) => w,
                    None => {
                        let w = nodes.len();
                        index.insert(key.clone(), w);
                        nodes.push(key);
                        succ.push(Vec::new());
                        queue.push_back(w);
                        w
                    }
                };
                succ[v].push(w);
            }
        }
        Ok(Product { automaton, letters, nodes, succ })
    }

    fn board_states(&self, set: &[usize]) -> BTreeSet<usize> {
        set.iter().map(|&v| self.nodes[v].1).collect()
    }

    /// A strongly connected set of product nodes violating the Rabin
    /// condition, if one exists.
    pub fn bad_component(&self) -> Option<Vec<usize>> {
        let all: Vec<usize> = (0..self.nodes.len()).collect();
        self.refine(&all)
    }

    fn refine(&self, set: &[usize]) -> Option<Vec<usize>> {
        let local: BTreeMap<usize, usize> = set.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let comps = scc(set.len(), |i| self.succ[set[i]].iter().filter_map(|w| local.get(w).copied()).collect());
        for comp in comps {
            let members: Vec<usize> = comp.iter().map(|&i| set[i]).collect();
            let nontrivial = members.len() > 1 || self.succ[members[0]].contains(&members[0]);
            if !nontrivial {
                continue;
            }
            let states = self.board_states(&members);
            let aut = &self.automaton;
            let good: Vec<u32> = (0..aut.pair_count())
                .filter(|&g| states.iter().any(|&q| aut.in_good(q, g)) && states.iter().all(|&q| !aut.in_bad(q, g)))
                .collect();
            if good.is_empty() {
                return Some(members);
            }
            let rest: Vec<usize> = members
                .into_iter()
                .filter(|&v| !good.iter().any(|&g| aut.in_good(self.nodes[v].1, g)))
                .collect();
            if let Some(bad) = self.refine(&rest) {
                return Some(bad);
            }
        }
        None
    }

    fn bfs_path(&self, from: usize, to: usize, allowed: &BTreeSet<usize>) -> Vec<usize> {
        let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
        let mut queue = VecDeque::from([from]);
        let mut seen = BTreeSet::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to && !(from == to && prev.is_empty() && v == from && seen.len() == 1 && false) {
                break;
            }
            for &w in &self.succ[v] {
                if allowed.contains(&w) && seen.insert(w) {
                    prev.insert(w, v);
                    queue.push_back(w);
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = to;
        while cur != from {
            path.push(cur);
            cur = prev[&cur];
        }
        path.push(from);
        path.reverse();
        path
    }

    /// A node lasso from the root whose loop runs through every node of `comp`.
    pub fn lasso_through(&self, comp: &[usize]) -> NodeLasso {
        let all: BTreeSet<usize> = (0..self.nodes.len()).collect();
        let inside: BTreeSet<usize> = comp.iter().copied().collect();
        let s = comp[0];
        let head = self.bfs_path(0, s, &all);
        let mut walk = Vec::from([s]);
        let mut cur = s;
        for &target in comp.iter().skip(1).chain(core::iter::once(&s)) {
            if target == cur && target != s {
                continue;
            }
            let leg = if target == cur {
                // close the loop through a successor
                let w = *self.succ[cur].iter().find(|w| inside.contains(w)).unwrap();
                let mut l = Vec::from([cur]);
                l.extend(self.bfs_path(w, target, &inside));
                l
            } else {
                self.bfs_path(cur, target, &inside)
            };
            walk.extend(leg.into_iter().skip(1));
            cur = target;
        }
        walk.pop(); // the final return to s
        NodeLasso {
            prefix: head[..head.len() - 1].iter().map(|&v| self.nodes[v].0.clone()).collect(),
            cycle: walk.iter().map(|&v| self.nodes[v].0.clone()).collect(),
        }
    }
}

/// Decides the global trace condition via the Safra product.
pub fn check_gtc(p: &Preproof, iota: &TraceInterpretation) -> Result<Verdict, GtcError> {
    let product = Product::build(p, iota)?;
    Ok(match product.bad_component() {
        None => Verdict::Proof,
        Some(comp) => Verdict::Counterexample(product.lasso_through(&comp)),
    })
}

/// Bounded reference check: every closed walk of at most `max_loop_len`
/// edges (through its least node, entered along the tree path) is tested
/// with the Büchi automaton.
pub fn check_gtc_oracle(p: &Preproof, iota: &TraceInterpretation, max_loop_len: usize) -> Result<Verdict, GtcError> {
    precheck(p, iota)?;
    let letters = proof_letters(p, iota);
    let aut = build_buchi(&iota.algebra, letters.list.clone());
    let addrs: Vec<&Address> = p.nodes().keys().collect();
    let index: BTreeMap<&Address, usize> = addrs.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let succ: Vec<Vec<usize>> = addrs.iter().map(|a| p.successors(a).iter().map(|c| index[c]).collect()).collect();
    let word = |walk: &[usize]| -> Vec<usize> {
        walk.windows(2)
            .map(|w| letters.get(&edge_morphism(p, iota, addrs[w[0]], addrs[w[1]])).unwrap())
            .collect()
    };
    for s in 0..addrs.len() {
        let tree_path: Vec<usize> = (0..=addrs[s].len()).map(|k| index[&Address(addrs[s].0[..k].to_vec())]).collect();
        let prefix = word(&tree_path);
        let mut stack: Vec<Vec<usize>> = Vec::from([Vec::from([s])]);
        while let Some(walk) = stack.pop() {
            let last = *walk.last().unwrap();
            for &w in &succ[last] {
                if w == s {
                    let mut closed = walk.clone();
                    closed.push(s);
                    let lp = word(&closed);
                    if !aut.accepts_lasso(&prefix, &lp).unwrap() {
                        let lasso = NodeLasso {
                            prefix: tree_path[..tree_path.len() - 1].iter().map(|&v| addrs[v].clone()).collect(),
                            cycle: walk.iter().map(|&v| addrs[v].clone()).collect(),
                        };
                        return Ok(Verdict::Counterexample(lasso));
                    }
                }
                if w > s && walk.len() < max_loop_len {
                    let mut next = walk.clone();
                    next.push(w);
                    stack.push(next);
                }
            }
        }
    }
    Ok(Verdict::Proof)
}

/// Replays a node lasso through the Safra automaton of `p`.
pub fn rabin_verdict_on(p: &Preproof, iota: &TraceInterpretation, lasso: &NodeLasso) -> Result<bool, GtcError> {
    let product = Product::build(p, iota)?;
    let (pre, lp) = induced_lasso(p, iota, lasso);
    let pre: Vec<usize> = pre.iter().map(|m| product.letters.get(m).unwrap()).collect();
    let lp: Vec<usize> = lp.iter().map(|m| product.letters.get(m).unwrap()).collect();
    Ok(product.automaton.accepts_lasso(&pre, &lp).unwrap())
}
