//! Concrete derivation systems and their compilation to the generic core.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Display;

use crate::algebra::{ActivationAlgebra, Elem};
use crate::gtc::TraceInterpretation;
use crate::proof::{Address, DerivationSystem, Node, Preproof, RuleId, SequentId};
use crate::trace::{TraceMorphism, TraceObject};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("rule {rule} does not apply to {sequent}")]
    NotApplicable { rule: String, sequent: String },
    #[error("malformed sequent: {0}")]
    MalformedSequent(String),
    #[error("formula is not well-named: {0}")]
    NotWellNamed(String),
    #[error("substitution undefined: {0}")]
    SubstitutionUndefined(String),
    #[error("unknown bud tag {0}")]
    UnknownTag(String),
    #[error("bud {tag} at {at} does not match its companion")]
    BudMismatch { tag: String, at: Address },
    #[error("trace map out of range for rule {0}")]
    BadMap(String),
}

/// A derivation system given by rule schemas over concrete sequents,
/// together with a trace interpretation.
pub trait Instance {
    type Sequent: Clone + Ord + Display;
    /// A rule schema with its parameters, applied to a conclusion.
    type Rule: Clone + Ord + Display;

    fn algebra(&self) -> ActivationAlgebra;

    fn premises(&self, rule: &Self::Rule, conclusion: &Self::Sequent) -> Result<Vec<Self::Sequent>, InstanceError>;

    /// Display names of the trace object of `s`.
    fn object(&self, s: &Self::Sequent) -> Vec<String>;

    /// One triple list per premise, over object positions.
    fn maps(
        &self,
        rule: &Self::Rule,
        conclusion: &Self::Sequent,
        premises: &[Self::Sequent],
    ) -> Vec<Vec<(u32, Elem, u32)>>;
}

/// A compiled instance proof: the finite fragment it uses.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub system: DerivationSystem,
    pub iota: TraceInterpretation,
    pub proof: Preproof,
}

/// Interns every sequent and rule instance of `p` and attaches trace data.
pub fn compile<I: Instance>(inst: &I, p: &Preproof<I::Sequent, I::Rule>) -> Result<Compiled, InstanceError> {
    let alg = inst.algebra();
    let mut system = DerivationSystem::new();
    let mut iota = TraceInterpretation::new(alg.clone());
    let intern = |s: &I::Sequent, system: &mut DerivationSystem, iota: &mut TraceInterpretation| {
        let id = system.sequent(&s.to_string());
        if iota.object(id).is_none() {
            iota.set_object(id, TraceObject::new(id.0, inst.object(s)));
        }
        id
    };
    let mut rules: BTreeMap<Address, RuleId> = BTreeMap::new();
    for (a, n) in p.nodes() {
        let concl = intern(&n.label, &mut system, &mut iota);
        let Some(r) = &n.rule else { continue };
        let prem: Vec<I::Sequent> = p.children(a).iter().map(|c| p.label(c).clone()).collect();
        let ids: Vec<SequentId> = prem.iter().map(|s| intern(s, &mut system, &mut iota)).collect();
        let rid = system.rule(&r.to_string(), concl, ids.clone());
        if iota.maps(rid).is_none() {
            let dom = iota.object(concl).unwrap();
            let ms = inst
                .maps(r, &n.label, &prem)
                .into_iter()
                .zip(&ids)
                .map(|(t, s)| TraceMorphism::new(&alg, dom, iota.object(*s).unwrap(), t))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| InstanceError::BadMap(r.to_string()))?;
            iota.set_maps(rid, ms);
        }
        rules.insert(a.clone(), rid);
    }
    let proof = p.map_labels(|_, s| system.find_sequent(&s.to_string()).unwrap(), |a, _| rules[a]);
    Ok(Compiled { system, iota, proof })
}

/// Proof outline: rule applications, named nodes and buds that refer to them.
#[derive(Clone, Debug)]
pub enum Sketch<R> {
    Rule(R, Vec<Sketch<R>>),
    /// Makes the node below a possible companion.
    Named(&'static str, Box<Sketch<R>>),
    Bud(&'static str),
    Open,
}

impl<R> Sketch<R> {
    pub fn rule(r: R, premises: Vec<Sketch<R>>) -> Self {
        Sketch::Rule(r, premises)
    }

    pub fn named(tag: &'static str, s: Sketch<R>) -> Self {
        Sketch::Named(tag, Box::new(s))
    }
}

/// Computes every label from the root sequent down, checking rule
/// applicability and that buds repeat their companion's sequent.
pub fn elaborate<I: Instance>(
    inst: &I,
    root: I::Sequent,
    sketch: &Sketch<I::Rule>,
) -> Result<Preproof<I::Sequent, I::Rule>, InstanceError> {
    let mut nodes = BTreeMap::new();
    let mut beta = BTreeMap::new();
    let mut named: BTreeMap<&'static str, Address> = BTreeMap::new();
    let mut buds: Vec<(Address, &'static str)> = Vec::new();
    let mut stack = Vec::from([(Address::root(), root, sketch)]);
    while let Some((a, s, sk)) = stack.pop() {
        match sk {
            Sketch::Named(tag, inner) => {
                named.insert(tag, a.clone());
                stack.push((a, s, inner));
            }
            Sketch::Bud(tag) => {
                buds.push((a.clone(), tag));
                nodes.insert(a, Node { label: s, rule: None });
            }
            Sketch::Open => {
                nodes.insert(a, Node { label: s, rule: None });
            }
            Sketch::Rule(r, subs) => {
                let prem = inst.premises(r, &s)?;
                if prem.len() != subs.len() {
                    return Err(InstanceError::NotApplicable { rule: r.to_string(), sequent: s.to_string() });
                }
                for (i, (ps, sub)) in prem.into_iter().zip(subs).enumerate() {
                    stack.push((a.child(i as u32 + 1), ps, sub));
                }
                nodes.insert(a, Node { label: s, rule: Some(r.clone()) });
            }
        }
    }
    for (t, tag) in buds {
        let c = named.get(tag).ok_or_else(|| InstanceError::UnknownTag(tag.into()))?;
        let ok = c.is_prefix_of(&t) && *c != t && nodes[c].label == nodes[&t].label && nodes[c].rule.is_some();
        if !ok {
            return Err(InstanceError::BudMismatch { tag: tag.into(), at: t });
        }
        beta.insert(t, c.clone());
    }
    Ok(Preproof::from_parts(nodes, beta))
}

/// Builds and compiles in one go.
pub fn build<I: Instance>(inst: &I, root: I::Sequent, sketch: &Sketch<I::Rule>) -> Result<Compiled, InstanceError> {
    compile(inst, &elaborate(inst, root, sketch)?)
}
