//! The reset proof system generated by a trace interpretation: sequents
//! annotated with Safra boards, structural board steps, lifted rules and the
//! local reset condition on bud segments.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::board::{Chip, SafraBoard, Stack};
use crate::gtc::TraceInterpretation;
use crate::proof::{
    Address, ConnectedCycle, DerivationSystem, Preproof, PreproofMorphism, PreproofViolation, ProofError, RuleId,
    SequentId,
};
use crate::trace::TraceMorphism;
use crate::Elem;

/// `Γ ; (Θ, σ)`
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AnnotatedSequent {
    pub base: SequentId,
    pub board: SafraBoard,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StepKind {
    Lifted(RuleId),
    Weak,
    Reset(Chip),
    Pop,
}

pub type ResetPreproof = Preproof<AnnotatedSequent, StepKind>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResetError {
    #[error("illegal {kind} step at {at}: {detail}")]
    IllegalTransition { at: Address, kind: String, detail: String },
    #[error(transparent)]
    InvalidPreproof(#[from] PreproofViolation),
    #[error("not a reset proof: bud {0} has no invariant")]
    NotAProof(Address),
    #[error("invariants of the cycle are not prefix-comparable")]
    NoLeastInvariant,
}

fn illegal(kind: &StepKind, detail: impl Into<String>) -> ResetError {
    ResetError::IllegalTransition { at: Address::root(), kind: format!("{kind:?}"), detail: detail.into() }
}

/// Checks one step: each premise board must arise from the conclusion
/// board by the transition that `kind` names.
pub fn validate_reset_step(
    sys: &DerivationSystem,
    iota: &TraceInterpretation,
    kind: &StepKind,
    conclusion: &AnnotatedSequent,
    premises: &[&AnnotatedSequent],
) -> Result<(), ResetError> {
    let alg = &iota.algebra;
    for s in core::iter::once(conclusion).chain(premises.iter().copied()) {
        if iota.object(s.base) != Some(s.board.object()) {
            return Err(illegal(kind, "board does not live on the trace object of its sequent"));
        }
    }
    let single = || -> Result<&AnnotatedSequent, ResetError> {
        match premises {
            [p] if p.base == conclusion.base => Ok(p),
            _ => Err(illegal(kind, "structural steps have one premise over the same sequent")),
        }
    };
    let b = &conclusion.board;
    match kind {
        StepKind::Weak => {
            let p = single()?;
            let w = b.weaken(p.board.sigma()).map_err(|e| illegal(kind, format!("{e}")))?;
            if w != p.board {
                return Err(illegal(kind, "premise is not a weakening"));
            }
        }
        StepKind::Reset(g) => {
            let p = single()?;
            let r = b.reset(*g).map_err(|e| illegal(kind, format!("{e}")))?;
            if r != p.board {
                return Err(illegal(kind, "premise is not the reset board"));
            }
        }
        StepKind::Pop => {
            let p = single()?;
            let cells: BTreeSet<u32> = p
                .board
                .sigma()
                .iter()
                .filter(|((_, a), s)| *a == Elem::ZERO && s.contains(&Stack::new()))
                .map(|((x, _), _)| *x)
                .collect();
            let q = b.populate(&cells).map_err(|e| illegal(kind, format!("{e}")))?;
            if q != p.board {
                return Err(illegal(kind, "premise is not a population"));
            }
        }
        StepKind::Lifted(r) => {
            let rule = sys.get_rule(*r).ok_or_else(|| illegal(kind, "unknown rule"))?;
            let bases: Vec<SequentId> = premises.iter().map(|p| p.base).collect();
            if rule.conclusion != conclusion.base || rule.premises != bases {
                return Err(illegal(kind, "sequents do not match the rule"));
            }
            let maps = iota.maps(*r).ok_or_else(|| illegal(kind, "rule has no trace maps"))?;
            for (tau, p) in maps.iter().zip(premises) {
                if !is_tau_successor(alg, b, tau, &p.board) {
                    return Err(illegal(kind, "premise board is not the successor"));
                }
            }
        }
    }
    Ok(())
}

/// Whether `next` is the `τ`-successor of `b` for some choice of fresh chips
/// outside `Θ(b)`. Fresh chips may sit in any order at the end of the control.
pub fn is_tau_successor(alg: &crate::ActivationAlgebra, b: &SafraBoard, tau: &TraceMorphism, next: &SafraBoard) -> bool {
    let Ok(moved) = b.moved(alg, tau) else { return false };
    if next.object() != moved.object() {
        return false;
    }
    let old = moved.control();
    if next.control().len() < old.len() || &next.control()[..old.len()] != old {
        return false;
    }
    let fresh: BTreeSet<Chip> = next.control()[old.len()..].iter().copied().collect();
    if fresh.iter().any(|c| b.contains_chip(*c)) {
        return false;
    }
    // compute with chips that cannot collide, then match them up by cell
    let mut avoid: BTreeSet<Chip> = b.control().iter().copied().collect();
    avoid.extend(next.control().iter().copied());
    let mut supply = crate::board::ChipSupply { limit: None, excluded: avoid };
    let Ok((succ, ours)) = b.tau_successor(alg, tau, &mut supply) else { return false };
    let mut rename = BTreeMap::new();
    for &g in &ours {
        let Some(((y, _), _)) = succ.sigma().iter().find(|(_, ss)| ss.iter().any(|s| s.last() == Some(&g))) else {
            return false;
        };
        let theirs: BTreeSet<Chip> = next
            .stacks((*y, Elem::ZERO))
            .filter_map(|s| s.last().copied())
            .filter(|c| fresh.contains(c))
            .collect();
        let [f] = theirs.into_iter().collect::<Vec<_>>()[..] else { return false };
        rename.insert(g, f);
    }
    let image: BTreeSet<Chip> = rename.values().copied().collect();
    if image.len() != rename.len() || image != fresh {
        return false;
    }
    succ.rename(&rename).sigma() == next.sigma()
}

/// Full validation: structure, bud labels including boards, and every step.
pub fn validate_reset_proof(
    sys: &DerivationSystem,
    iota: &TraceInterpretation,
    rp: &ResetPreproof,
) -> Result<(), ResetError> {
    rp.validate_structure()?;
    for (a, n) in rp.nodes() {
        if iota.object(n.label.base) != Some(n.label.board.object()) {
            return Err(ResetError::IllegalTransition {
                at: a.clone(),
                kind: "annotation".into(),
                detail: "board does not live on the trace object of its sequent".into(),
            });
        }
        let Some(kind) = &n.rule else { continue };
        let ch = rp.children(a);
        let prem: Vec<&AnnotatedSequent> = ch.iter().map(|c| rp.label(c)).collect();
        validate_reset_step(sys, iota, kind, &n.label, &prem).map_err(|e| match e {
            ResetError::IllegalTransition { kind, detail, .. } => {
                ResetError::IllegalTransition { at: a.clone(), kind, detail }
            }
            e => e,
        })?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResetVerdict {
    /// The longest invariant of every bud.
    Proof(BTreeMap<Address, Vec<Chip>>),
    FailingBud(Address),
}

impl ResetVerdict {
    pub fn is_proof(&self) -> bool {
        matches!(self, ResetVerdict::Proof(_))
    }
}

fn common_prefix<'a>(mut controls: impl Iterator<Item = &'a [Chip]>) -> Vec<Chip> {
    let Some(first) = controls.next() else { return Vec::new() };
    let mut n = first.len();
    for c in controls {
        n = n.min(first.iter().zip(c).take_while(|(a, b)| a == b).count());
    }
    first[..n].to_vec()
}

/// The longest invariant of bud `t`, reading only the nodes of `β(t)..t`.
pub fn bud_invariant(rp: &ResetPreproof, t: &Address, visit: &mut impl FnMut(&Address)) -> Option<Vec<Chip>> {
    let seg = rp.segment(t);
    for a in &seg {
        visit(a);
    }
    let theta = common_prefix(seg.iter().map(|a| rp.label(a).board.control()));
    let best = seg
        .iter()
        .filter_map(|a| match rp.rule(a) {
            Some(StepKind::Reset(g)) => theta.iter().position(|c| c == g),
            _ => None,
        })
        .max()?;
    Some(theta[..=best].to_vec())
}

/// The reset condition on a validated reset preproof. `visit` sees every
/// node the check reads.
pub fn reset_condition_traced(rp: &ResetPreproof, mut visit: impl FnMut(&Address)) -> ResetVerdict {
    let mut inv = BTreeMap::new();
    for t in rp.buds() {
        match bud_invariant(rp, t, &mut visit) {
            Some(th) => {
                inv.insert(t.clone(), th);
            }
            None => return ResetVerdict::FailingBud(t.clone()),
        }
    }
    ResetVerdict::Proof(inv)
}

/// Validates `rp`, then checks that every bud segment has an invariant.
pub fn check_reset_condition(
    sys: &DerivationSystem,
    iota: &TraceInterpretation,
    rp: &ResetPreproof,
) -> Result<ResetVerdict, ResetError> {
    validate_reset_proof(sys, iota, rp)?;
    Ok(reset_condition_traced(rp, |_| {}))
}

/// A bud of `eta` whose invariant is a prefix of the invariants of all
/// other buds of `eta`, with that invariant.
pub fn invariants_of_connected_cycle(
    rp: &ResetPreproof,
    eta: &ConnectedCycle,
) -> Result<(Address, Vec<Chip>), ResetError> {
    let mut all = Vec::new();
    for t in &eta.buds {
        let th = bud_invariant(rp, t, &mut |_| {}).ok_or_else(|| ResetError::NotAProof(t.clone()))?;
        all.push((t.clone(), th));
    }
    let least = all.iter().min_by_key(|(_, th)| th.len()).cloned().ok_or(ResetError::NoLeastInvariant)?;
    if all.iter().all(|(_, th)| th.starts_with(&least.1)) {
        Ok(least)
    } else {
        Err(ResetError::NoLeastInvariant)
    }
}

/// Forgets boards: lifted steps become their rule, structural steps vanish.
pub struct Strip<'a>(pub &'a DerivationSystem);

impl PreproofMorphism<AnnotatedSequent, StepKind> for Strip<'_> {
    type S2 = SequentId;
    type R2 = RuleId;

    fn map_sequent(&self, s: &AnnotatedSequent) -> SequentId {
        s.base
    }

    fn map_rule(
        &self,
        rule: &StepKind,
        conclusion: &AnnotatedSequent,
        premises: &[&AnnotatedSequent],
    ) -> Option<Preproof<SequentId, RuleId>> {
        match rule {
            StepKind::Lifted(r) => Some(Preproof::single_step(conclusion.base, *r, premises.iter().map(|p| p.base).collect())),
            _ => Some(Preproof::leaf(conclusion.base)),
        }
    }
}

pub fn strip(sys: &DerivationSystem, rp: &ResetPreproof) -> Result<Preproof, ProofError> {
    rp.apply_morphism(&Strip(sys))
}
