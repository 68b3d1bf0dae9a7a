//! Cyclic trees, derivation systems and preproofs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// A node address: the sequence of 1-based child indices from the root.
///
/// The derived `Ord` is lexicographic with prefixes first, which is the
/// document (pre-order) order of a tree.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address(pub Vec<u32>);

impl Address {
    pub fn root() -> Self {
        Address(Vec::new())
    }

    pub fn child(&self, i: u32) -> Self {
        let mut v = self.0.clone();
        v.push(i);
        Address(v)
    }

    pub fn parent(&self) -> Option<Self> {
        let (_, init) = self.0.split_last()?;
        Some(Address(init.to_vec()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self ≤ other` in the prefix order.
    pub fn is_prefix_of(&self, other: &Address) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn concat(&self, suffix: &Address) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&suffix.0);
        Address(v)
    }

    pub fn strip_prefix(&self, prefix: &Address) -> Option<Address> {
        self.0.strip_prefix(prefix.0.as_slice()).map(|s| Address(s.to_vec()))
    }

    /// Parses `ε` / empty string, or dot-separated indices such as `1.2.1`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s.is_empty() || s == "ε" || s == "e" {
            return Some(Address::root());
        }
        s.split('.')
            .map(|p| p.parse::<u32>().ok().filter(|&i| i > 0))
            .collect::<Option<Vec<_>>>()
            .map(Address)
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl From<&[u32]> for Address {
    fn from(v: &[u32]) -> Self {
        Address(v.to_vec())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SequentId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleId(pub u32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub conclusion: SequentId,
    pub premises: Vec<SequentId>,
}

/// `(Seq, ℛ, ρ)` with opaque sequents identified by their display strings.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DerivationSystem {
    sequents: Vec<String>,
    by_display: BTreeMap<String, SequentId>,
    rules: Vec<Rule>,
}

impl DerivationSystem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns a sequent by display string.
    pub fn sequent(&mut self, display: &str) -> SequentId {
        if let Some(&id) = self.by_display.get(display) {
            return id;
        }
        let id = SequentId(self.sequents.len() as u32);
        self.sequents.push(display.into());
        self.by_display.insert(display.into(), id);
        id
    }

    /// Interns a rule; identical `(name, conclusion, premises)` share an id.
    pub fn rule(&mut self, name: &str, conclusion: SequentId, premises: Vec<SequentId>) -> RuleId {
        if let Some(i) = self
            .rules
            .iter()
            .position(|r| r.name == name && r.conclusion == conclusion && r.premises == premises)
        {
            return RuleId(i as u32);
        }
        self.rules.push(Rule { name: name.into(), conclusion, premises });
        RuleId(self.rules.len() as u32 - 1)
    }

    pub fn find_sequent(&self, display: &str) -> Option<SequentId> {
        self.by_display.get(display).copied()
    }

    pub fn display(&self, s: SequentId) -> &str {
        &self.sequents[s.0 as usize]
    }

    pub fn rho(&self, r: RuleId) -> &Rule {
        &self.rules[r.0 as usize]
    }

    pub fn get_rule(&self, r: RuleId) -> Option<&Rule> {
        self.rules.get(r.0 as usize)
    }

    pub fn sequents(&self) -> impl Iterator<Item = (SequentId, &str)> {
        self.sequents.iter().enumerate().map(|(i, s)| (SequentId(i as u32), s.as_str()))
    }

    pub fn rules(&self) -> impl Iterator<Item = (RuleId, &Rule)> {
        self.rules.iter().enumerate().map(|(i, r)| (RuleId(i as u32), r))
    }

    pub fn sequent_count(&self) -> usize {
        self.sequents.len()
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Node<S, R> {
    pub label: S,
    pub rule: Option<R>,
}

/// A finite cyclic tree with node labels, a partial rule assignment and
/// back-edges from buds to strict ancestors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Preproof<S = SequentId, R = RuleId> {
    nodes: BTreeMap<Address, Node<S, R>>,
    beta: BTreeMap<Address, Address>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Clause {
    MissingRoot,
    NotPrefixClosed,
    ChildrenNotContiguous,
    BudNotALeaf,
    BudHasRule,
    MissingNode,
    CompanionNotAncestor,
    CompanionNotInner,
    BudLabelMismatch,
    InnerWithoutRule,
    UnknownRule,
    ConclusionMismatch,
    PremiseCount { expected: usize, found: usize },
    PremiseMismatch(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("preproof violation at {address}: {clause:?}")]
pub struct PreproofViolation {
    pub address: Address,
    pub clause: Clause,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ProofError {
    #[error("{0} fillers for {1} open leaves")]
    CountMismatch(usize, usize),
    #[error("filler {0} does not conclude the label of its open leaf")]
    EndsequentMismatch(usize),
    #[error("{0} is not a bud")]
    NotABud(Address),
    #[error("no image for the rule at {0}")]
    MissingRuleImage(Address),
    #[error("image of the rule at {0} does not fit")]
    ShapeMismatch(Address),
    #[error("cycle through {0} collapses to a single node")]
    DegenerateCycle(Address),
    #[error(transparent)]
    Invalid(#[from] PreproofViolation),
}

fn violation(address: &Address, clause: Clause) -> PreproofViolation {
    PreproofViolation { address: address.clone(), clause }
}

impl<S: Clone + Eq, R: Clone> Preproof<S, R> {
    /// No structural checks; see [`Preproof::validate_structure`].
    pub fn from_parts(nodes: BTreeMap<Address, Node<S, R>>, beta: BTreeMap<Address, Address>) -> Self {
        Preproof { nodes, beta }
    }

    /// The identity preproof: a single open leaf.
    pub fn leaf(label: S) -> Self {
        let mut nodes = BTreeMap::new();
        nodes.insert(Address::root(), Node { label, rule: None });
        Preproof { nodes, beta: BTreeMap::new() }
    }

    /// One rule application with open premises.
    pub fn single_step(conclusion: S, rule: R, premises: Vec<S>) -> Self {
        let mut nodes = BTreeMap::new();
        nodes.insert(Address::root(), Node { label: conclusion, rule: Some(rule) });
        for (i, p) in premises.into_iter().enumerate() {
            nodes.insert(Address(vec![i as u32 + 1]), Node { label: p, rule: None });
        }
        Preproof { nodes, beta: BTreeMap::new() }
    }

    pub fn nodes(&self) -> &BTreeMap<Address, Node<S, R>> {
        &self.nodes
    }

    pub fn beta(&self) -> &BTreeMap<Address, Address> {
        &self.beta
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, t: &Address) -> Option<&Node<S, R>> {
        self.nodes.get(t)
    }

    pub fn label(&self, t: &Address) -> &S {
        &self.nodes[t].label
    }

    pub fn rule(&self, t: &Address) -> Option<&R> {
        self.nodes.get(t).and_then(|n| n.rule.as_ref())
    }

    pub fn companion(&self, t: &Address) -> Option<&Address> {
        self.beta.get(t)
    }

    pub fn is_bud(&self, t: &Address) -> bool {
        self.beta.contains_key(t)
    }

    pub fn endsequent(&self) -> &S {
        self.label(&Address::root())
    }

    pub fn children(&self, t: &Address) -> Vec<Address> {
        (1..).map(|i| t.child(i)).take_while(|c| self.nodes.contains_key(c)).collect()
    }

    pub fn is_leaf(&self, t: &Address) -> bool {
        !self.nodes.contains_key(&t.child(1))
    }

    /// Non-bud leaves without a rule, in document order.
    pub fn open_leaves(&self) -> Vec<Address> {
        self.nodes
            .iter()
            .filter(|(a, n)| n.rule.is_none() && !self.beta.contains_key(*a) && self.is_leaf(a))
            .map(|(a, _)| a.clone())
            .collect()
    }

    pub fn assumptions(&self) -> Vec<S> {
        self.open_leaves().iter().map(|a| self.label(a).clone()).collect()
    }

    pub fn buds(&self) -> impl Iterator<Item = &Address> {
        self.beta.keys()
    }

    /// Tree-shape invariants plus `λ(t) = λ(β(t))` on buds.
    pub fn validate_structure(&self) -> Result<(), PreproofViolation> {
        let root = Address::root();
        if !self.nodes.contains_key(&root) {
            return Err(violation(&root, Clause::MissingRoot));
        }
        for (a, n) in &self.nodes {
            if let Some(p) = a.parent() {
                if !self.nodes.contains_key(&p) {
                    return Err(violation(a, Clause::NotPrefixClosed));
                }
                let last = *a.0.last().unwrap();
                if last == 0 || (last > 1 && !self.nodes.contains_key(&p.child(last - 1))) {
                    return Err(violation(a, Clause::ChildrenNotContiguous));
                }
            }
            if !self.is_leaf(a) && n.rule.is_none() {
                return Err(violation(a, Clause::InnerWithoutRule));
            }
        }
        for (t, c) in &self.beta {
            let Some(n) = self.nodes.get(t) else {
                return Err(violation(t, Clause::MissingNode));
            };
            if !self.is_leaf(t) {
                return Err(violation(t, Clause::BudNotALeaf));
            }
            if n.rule.is_some() {
                return Err(violation(t, Clause::BudHasRule));
            }
            if !(c.is_prefix_of(t) && c != t) || !self.nodes.contains_key(c) {
                return Err(violation(t, Clause::CompanionNotAncestor));
            }
            if self.is_leaf(c) {
                return Err(violation(t, Clause::CompanionNotInner));
            }
            if self.nodes[c].label != n.label {
                return Err(violation(t, Clause::BudLabelMismatch));
            }
        }
        Ok(())
    }

    /// The maximal connected cycles.
    ///
    /// With `t → s` iff `β(t) ≤ s`, every connected cycle lies inside one
    /// strongly connected component of this relation on buds, and each
    /// component is itself a connected cycle whose base has the shortest
    /// companion.
    pub fn connected_cycles(&self) -> Vec<ConnectedCycle> {
        let buds: Vec<&Address> = self.beta.keys().collect();
        let n = buds.len();
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| self.beta[buds[i]].is_prefix_of(buds[j])).collect())
            .collect();
        let comps = scc(n, |v| adj[v].clone());
        let mut out: Vec<ConnectedCycle> = comps
            .into_iter()
            .map(|comp| {
                let members: BTreeSet<Address> = comp.iter().map(|&i| buds[i].clone()).collect();
                let base = members
                    .iter()
                    .min_by_key(|t| (self.beta[*t].len(), (*t).clone()))
                    .unwrap()
                    .clone();
                let region = self.region(&members);
                ConnectedCycle { buds: members, base, region }
            })
            .collect();
        out.sort_by(|a, b| a.buds.cmp(&b.buds));
        out
    }

    /// `C[η] = {s | ∃t ∈ η: β(t) ≤ s ≤ t}`.
    pub fn region(&self, eta: &BTreeSet<Address>) -> BTreeSet<Address> {
        let mut out = BTreeSet::new();
        for t in eta {
            out.extend(self.segment(t));
        }
        out
    }

    /// The path `β(t) .. t` inclusive.
    pub fn segment(&self, t: &Address) -> Vec<Address> {
        let c = &self.beta[t];
        (c.len()..=t.len()).map(|k| Address(t.0[..k].to_vec())).collect()
    }

    /// Grafts `fillers[i]` at the i-th open leaf (document order).
    pub fn compose(&self, fillers: Vec<Preproof<S, R>>) -> Result<Preproof<S, R>, ProofError> {
        let open = self.open_leaves();
        if open.len() != fillers.len() {
            return Err(ProofError::CountMismatch(fillers.len(), open.len()));
        }
        let mut out = self.clone();
        for (i, (o, f)) in open.iter().zip(fillers).enumerate() {
            if f.endsequent() != out.label(o) {
                return Err(ProofError::EndsequentMismatch(i));
            }
            out.nodes.remove(o);
            for (a, n) in f.nodes {
                out.nodes.insert(o.concat(&a), n);
            }
            for (t, c) in f.beta {
                out.beta.insert(o.concat(&t), o.concat(&c));
            }
        }
        Ok(out)
    }

    /// One unfolding step at bud `t`: the subtree at `β(t)` is copied below
    /// `t`. The fresh copy of `t` points to `t` or to `β(t)`; other copied
    /// buds whose companion lies in the copied region point into the copy.
    pub fn unfold_at(&self, t: &Address, retarget: Retarget) -> Result<Preproof<S, R>, ProofError> {
        let c = self.beta.get(t).ok_or_else(|| ProofError::NotABud(t.clone()))?;
        let fresh = t.concat(&t.strip_prefix(c).unwrap());
        self.unfold_at_with(t, &BTreeMap::from([(fresh, retarget)]))
    }

    /// Copied buds whose companion is an ancestor of `t` inside the copied
    /// region, so the companion exists both as original and as copy.
    /// Addresses are those of the copies.
    pub fn ambiguous_copies(&self, t: &Address) -> Result<Vec<Address>, ProofError> {
        let c = self.beta.get(t).ok_or_else(|| ProofError::NotABud(t.clone()))?;
        Ok(self
            .beta
            .range(c.clone()..)
            .take_while(|(s, _)| c.is_prefix_of(s))
            .filter(|(_, w)| c.is_prefix_of(w) && w.is_prefix_of(t))
            .map(|(s, _)| t.concat(&s.strip_prefix(c).unwrap()))
            .collect())
    }

    /// [`Preproof::unfold_at`] with a choice for every ambiguous copy:
    /// `NewBud` points into the copy, `OldCompanion` to the original.
    /// Copies without an entry point into the copy.
    pub fn unfold_at_with(&self, t: &Address, choice: &BTreeMap<Address, Retarget>) -> Result<Preproof<S, R>, ProofError> {
        let c = self.beta.get(t).ok_or_else(|| ProofError::NotABud(t.clone()))?.clone();
        let mut out = self.clone();
        out.beta.remove(t);
        for (s, n) in self.nodes.range(c.clone()..) {
            let Some(u) = s.strip_prefix(&c) else { break };
            let copy = t.concat(&u);
            out.nodes.insert(copy.clone(), n.clone());
            if let Some(w) = self.beta.get(s) {
                let target = match w.strip_prefix(&c) {
                    Some(_) if choice.get(&copy) == Some(&Retarget::OldCompanion) && w.is_prefix_of(t) => w.clone(),
                    Some(v) => t.concat(&v),
                    None => w.clone(),
                };
                out.beta.insert(copy, target);
            }
        }
        Ok(out)
    }

    /// Lassos over the proof graph (child edges plus back-edges), one per
    /// simple cycle. The loop starts at the cycle node closest to the root
    /// and the prefix is the tree path to it.
    pub fn infinite_branch_lassos(&self) -> Vec<NodeLasso> {
        let index: BTreeMap<&Address, usize> = self.nodes.keys().enumerate().map(|(i, a)| (a, i)).collect();
        let addrs: Vec<&Address> = self.nodes.keys().collect();
        let succ: Vec<Vec<usize>> = addrs
            .iter()
            .map(|a| match self.beta.get(*a) {
                Some(c) => vec![index[c]],
                None => self.children(a).iter().map(|c| index[c]).collect(),
            })
            .collect();
        let mut out = Vec::new();
        for cyc in simple_cycles(addrs.len(), &succ) {
            let k = (0..cyc.len()).min_by_key(|&i| addrs[cyc[i]].len()).unwrap();
            let mut lp: Vec<Address> = Vec::with_capacity(cyc.len());
            for i in 0..cyc.len() {
                lp.push(addrs[cyc[(k + i) % cyc.len()]].clone());
            }
            let head = &lp[0];
            let prefix = (0..head.len()).map(|j| Address(head.0[..j].to_vec())).collect();
            out.push(NodeLasso { prefix, cycle: lp });
        }
        out
    }

    /// Edges of the proof graph from `t`: children, or the companion of a bud.
    pub fn successors(&self, t: &Address) -> Vec<Address> {
        match self.beta.get(t) {
            Some(c) => vec![c.clone()],
            None => self.children(t),
        }
    }

    /// Relabels every node; the tree is unchanged.
    pub fn map_labels<S2: Clone + Eq, R2: Clone>(
        &self,
        mut fs: impl FnMut(&Address, &S) -> S2,
        mut fr: impl FnMut(&Address, &R) -> R2,
    ) -> Preproof<S2, R2> {
        let nodes = self
            .nodes
            .iter()
            .map(|(a, n)| (a.clone(), Node { label: fs(a, &n.label), rule: n.rule.as_ref().map(|r| fr(a, r)) }))
            .collect();
        Preproof { nodes, beta: self.beta.clone() }
    }
}

impl Preproof<SequentId, RuleId> {
    /// Structure plus agreement with `ρ`.
    pub fn validate(&self, sys: &DerivationSystem) -> Result<(), PreproofViolation> {
        self.validate_structure()?;
        for (a, n) in &self.nodes {
            let Some(r) = n.rule else { continue };
            let Some(rule) = sys.get_rule(r) else {
                return Err(violation(a, Clause::UnknownRule));
            };
            if rule.conclusion != n.label {
                return Err(violation(a, Clause::ConclusionMismatch));
            }
            let ch = self.children(a);
            if ch.len() != rule.premises.len() {
                return Err(violation(a, Clause::PremiseCount { expected: rule.premises.len(), found: ch.len() }));
            }
            for (i, c) in ch.iter().enumerate() {
                if self.nodes[c].label != rule.premises[i] {
                    return Err(violation(a, Clause::PremiseMismatch(i + 1)));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Retarget {
    NewBud,
    OldCompanion,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectedCycle {
    pub buds: BTreeSet<Address>,
    pub base: Address,
    pub region: BTreeSet<Address>,
}

/// An ultimately periodic walk through a proof graph: `prefix` leads from
/// the root to `cycle[0]`, and the last cycle node has an edge to `cycle[0]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeLasso {
    pub prefix: Vec<Address>,
    pub cycle: Vec<Address>,
}

/// A map of derivation systems, given rule by rule.
pub trait PreproofMorphism<S, R> {
    type S2: Clone + Eq;
    type R2: Clone;
    fn map_sequent(&self, s: &S) -> Self::S2;
    /// Image of one rule instance, a preproof whose open leaves are the
    /// images of `premises` in document order.
    fn map_rule(&self, rule: &R, conclusion: &S, premises: &[&S]) -> Option<Preproof<Self::S2, Self::R2>>;
}

impl<S: Clone + Eq, R: Clone> Preproof<S, R> {
    /// Replaces every rule application by its image and re-ties buds to the
    /// images of their companions.
    pub fn apply_morphism<F>(&self, f: &F) -> Result<Preproof<F::S2, F::R2>, ProofError>
    where
        F: PreproofMorphism<S, R>,
    {
        let companions: BTreeSet<&Address> = self.beta.values().collect();
        let (p, rest) = self.apply_at(f, &Address::root(), &companions)?;
        debug_assert!(rest.iter().all(|o| !self.beta.contains_key(o)));
        Ok(p)
    }

    #[allow(clippy::type_complexity)]
    fn apply_at<F>(
        &self,
        f: &F,
        t: &Address,
        companions: &BTreeSet<&Address>,
    ) -> Result<(Preproof<F::S2, F::R2>, Vec<Address>), ProofError>
    where
        F: PreproofMorphism<S, R>,
    {
        let node = &self.nodes[t];
        let Some(r) = &node.rule else {
            return Ok((Preproof::leaf(f.map_sequent(&node.label)), vec![t.clone()]));
        };
        let ch = self.children(t);
        let prem: Vec<&S> = ch.iter().map(|c| &self.nodes[c].label).collect();
        let img = f.map_rule(r, &node.label, &prem).ok_or_else(|| ProofError::MissingRuleImage(t.clone()))?;
        if *img.endsequent() != f.map_sequent(&node.label) {
            return Err(ProofError::ShapeMismatch(t.clone()));
        }
        let mut subs = Vec::with_capacity(ch.len());
        let mut origins = Vec::new();
        for c in &ch {
            let (p, o) = self.apply_at(f, c, companions)?;
            subs.push(p);
            origins.extend(o);
        }
        let mut out = img.compose(subs).map_err(|_| ProofError::ShapeMismatch(t.clone()))?;
        if companions.contains(t) {
            let open = out.open_leaves();
            debug_assert_eq!(open.len(), origins.len());
            let mut keep = Vec::new();
            for (leaf, o) in open.into_iter().zip(origins) {
                if self.beta.get(&o) == Some(t) {
                    if leaf.is_root() {
                        return Err(ProofError::DegenerateCycle(t.clone()));
                    }
                    out.beta.insert(leaf, Address::root());
                } else {
                    keep.push(o);
                }
            }
            return Ok((out, keep));
        }
        Ok((out, origins))
    }
}

/// Tarjan's algorithm; components in reverse topological order.
pub fn scc<F: Fn(usize) -> Vec<usize>>(n: usize, succ: F) -> Vec<Vec<usize>> {
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        // explicit DFS stack of (node, successor list, cursor)
        let mut work: Vec<(usize, Vec<usize>, usize)> = vec![(root, succ(root), 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on[root] = true;
        while let Some((v, ss, i)) = work.last_mut() {
            if *i < ss.len() {
                let w = ss[*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on[w] = true;
                    let sw = succ(w);
                    work.push((w, sw, 0));
                } else if on[w] {
                    let v = *v;
                    low[v] = low[v].min(index[w]);
                }
            } else {
                let v = *v;
                work.pop();
                if let Some((p, _, _)) = work.last() {
                    low[*p] = low[*p].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// All simple cycles, each listed once starting from its least vertex.
pub fn simple_cycles(n: usize, succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    let mut on = vec![false; n];
    fn go(
        s: usize,
        v: usize,
        succ: &[Vec<usize>],
        path: &mut Vec<usize>,
        on: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        path.push(v);
        on[v] = true;
        for &w in &succ[v] {
            if w == s {
                out.push(path.clone());
            } else if w > s && !on[w] {
                go(s, w, succ, path, on, out);
            }
        }
        path.pop();
        on[v] = false;
    }
    for s in 0..n {
        go(s, s, succ, &mut path, &mut on, &mut out);
    }
    out
}
