//! Safra boards and their transitions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt::Write as _;

use crate::algebra::{ActivationAlgebra, Elem};
use crate::trace::{Obj, TraceMorphism};

pub type Chip = u32;
/// A stack listed bottom to top, i.e. in control order.
pub type Stack = Vec<Chip>;
/// A board cell `(x, a)`.
pub type Cell = (u32, Elem);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoardError {
    #[error("chip {0} is not on the board")]
    UnknownChip(Chip),
    #[error("chip {0} is not covered")]
    NotCovered(Chip),
    #[error("stacks are equal")]
    EqualStacks,
    #[error("kept stacks are not a subset of the board")]
    NotASubset,
    #[error("board lives on {board:?}, morphism starts at {morphism:?}")]
    ObjectMismatch { board: Obj, morphism: Obj },
    #[error("chip supply exhausted")]
    SupplyExhausted,
    #[error("malformed board: {0}")]
    Malformed(&'static str),
}

/// A control `Θ` (ordered chips) and stacks `σ(x, a)`.
///
/// Invariants: every chip of the control lies in some stack, every stack is
/// a subset of the control listed in control order, and no cell maps to an
/// empty set of stacks.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SafraBoard {
    object: Obj,
    control: Vec<Chip>,
    sigma: BTreeMap<Cell, BTreeSet<Stack>>,
}

/// Source of fresh chips for the Cover phase.
pub trait ChipAllocator {
    /// A chip outside `in_use`, or `None` when the supply is exhausted.
    fn allocate(&mut self, in_use: &BTreeSet<Chip>) -> Option<Chip>;
}

/// Hands out the numerically smallest chip below `limit` that is neither in
/// use nor excluded.
#[derive(Clone, Debug, Default)]
pub struct ChipSupply {
    pub limit: Option<Chip>,
    pub excluded: BTreeSet<Chip>,
}

impl ChipSupply {
    pub fn unbounded() -> Self {
        Self::default()
    }

    pub fn bounded(limit: Chip, excluded: BTreeSet<Chip>) -> Self {
        ChipSupply { limit: Some(limit), excluded }
    }
}

impl ChipAllocator for ChipSupply {
    fn allocate(&mut self, in_use: &BTreeSet<Chip>) -> Option<Chip> {
        let limit = self.limit.unwrap_or(Chip::MAX);
        let c = (0..limit).find(|c| !in_use.contains(c) && !self.excluded.contains(c))?;
        self.excluded.insert(c);
        Some(c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransitionKind {
    Tau,
    Weak,
    Thin,
    Reset(Chip),
    Pop,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranscriptStep {
    pub kind: TransitionKind,
    pub before: SafraBoard,
    pub after: SafraBoard,
}

/// The boards passed through by one greedy step.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    pub steps: Vec<TranscriptStep>,
}

impl Transcript {
    fn push(&mut self, kind: TransitionKind, before: &SafraBoard, after: &SafraBoard) {
        self.steps.push(TranscriptStep { kind, before: before.clone(), after: after.clone() });
    }

    pub fn resets(&self) -> impl Iterator<Item = Chip> + '_ {
        self.steps.iter().filter_map(|s| match s.kind {
            TransitionKind::Reset(g) => Some(g),
            _ => None,
        })
    }

    pub fn find(&self, kind: &TransitionKind) -> Option<&TranscriptStep> {
        self.steps.iter().find(|s| &s.kind == kind)
    }
}

/// `K̄ = {0, …, K·(|A|+1) − 1}` has this many chips.
pub fn supply_size(alg: &ActivationAlgebra, k: u32) -> u32 {
    k * (alg.len() as u32 + 1)
}

impl SafraBoard {
    pub fn empty(object: Obj) -> Self {
        SafraBoard { object, control: Vec::new(), sigma: BTreeMap::new() }
    }

    /// Builds and checks a board. Stacks may be given in any order.
    pub fn new(
        object: Obj,
        control: Vec<Chip>,
        cells: impl IntoIterator<Item = (Cell, Vec<Vec<Chip>>)>,
        alg: &ActivationAlgebra,
    ) -> Result<Self, BoardError> {
        let pos: BTreeMap<Chip, usize> = control.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        if pos.len() != control.len() {
            return Err(BoardError::Malformed("duplicate chip in control"));
        }
        let mut sigma: BTreeMap<Cell, BTreeSet<Stack>> = BTreeMap::new();
        for ((x, a), stacks) in cells {
            if x >= object.size || !alg.contains(a) {
                return Err(BoardError::Malformed("cell outside the board"));
            }
            for mut s in stacks {
                for c in &s {
                    if !pos.contains_key(c) {
                        return Err(BoardError::UnknownChip(*c));
                    }
                }
                s.sort_by_key(|c| pos[c]);
                if s.windows(2).any(|w| w[0] == w[1]) {
                    return Err(BoardError::Malformed("duplicate chip in stack"));
                }
                sigma.entry((x, a)).or_default().insert(s);
            }
        }
        let b = SafraBoard { object, control, sigma };
        if b.used_chips().len() != b.control.len() {
            return Err(BoardError::Malformed("control chip on no stack"));
        }
        Ok(b)
    }

    pub fn object(&self) -> Obj {
        self.object
    }

    pub fn control(&self) -> &[Chip] {
        &self.control
    }

    pub fn sigma(&self) -> &BTreeMap<Cell, BTreeSet<Stack>> {
        &self.sigma
    }

    pub fn stacks(&self, cell: Cell) -> impl Iterator<Item = &Stack> {
        self.sigma.get(&cell).into_iter().flatten()
    }

    pub fn contains_chip(&self, c: Chip) -> bool {
        self.control.contains(&c)
    }

    fn pos(&self, c: Chip) -> Option<usize> {
        self.control.iter().position(|&d| d == c)
    }

    fn used_chips(&self) -> BTreeSet<Chip> {
        self.sigma.values().flatten().flatten().copied().collect()
    }

    /// Drops control chips that sit on no stack.
    fn prune(mut self) -> Self {
        self.sigma.retain(|_, s| !s.is_empty());
        let used = self.used_chips();
        self.control.retain(|c| used.contains(c));
        self
    }

    /// Chips that are the top of no stack, in control order.
    pub fn covered_chips(&self) -> Vec<Chip> {
        let tops: BTreeSet<Chip> = self.sigma.values().flatten().filter_map(|s| s.last().copied()).collect();
        self.control.iter().copied().filter(|c| !tops.contains(c)).collect()
    }

    pub fn is_covered(&self, c: Chip) -> bool {
        self.contains_chip(c) && !self.sigma.values().flatten().any(|s| s.last() == Some(&c))
    }

    /// `Less` iff `s1 <_Θ s2`: `s1` holds the control-least chip of `s1 Δ s2`.
    /// Both stacks must be listed in control order.
    pub fn cmp_stacks(&self, s1: &[Chip], s2: &[Chip]) -> Ordering {
        for (a, b) in s1.iter().zip(s2) {
            if a != b {
                return self.pos(*a).cmp(&self.pos(*b));
            }
        }
        // one is a prefix of the other: the longer one is smaller
        s2.len().cmp(&s1.len())
    }

    pub fn stack_less(&self, s1: &[Chip], s2: &[Chip]) -> Result<bool, BoardError> {
        let norm = |s: &[Chip]| -> Result<Stack, BoardError> {
            let mut v = s.to_vec();
            for c in &v {
                self.pos(*c).ok_or(BoardError::UnknownChip(*c))?;
            }
            v.sort_by_key(|c| self.pos(*c));
            v.dedup();
            Ok(v)
        };
        let (a, b) = (norm(s1)?, norm(s2)?);
        if a == b {
            return Err(BoardError::EqualStacks);
        }
        Ok(self.cmp_stacks(&a, &b) == Ordering::Less)
    }

    /// The Move phase only: stacks travel along `τ`; chips on no stack leave.
    pub fn moved(&self, alg: &ActivationAlgebra, tau: &TraceMorphism) -> Result<SafraBoard, BoardError> {
        if tau.dom() != self.object {
            return Err(BoardError::ObjectMismatch { board: self.object, morphism: tau.dom() });
        }
        let mut sigma: BTreeMap<Cell, BTreeSet<Stack>> = BTreeMap::new();
        for (&(x, b), stacks) in &self.sigma {
            for &(_, c, y) in tau.from(x) {
                sigma.entry((y, alg.join(b, c))).or_default().extend(stacks.iter().cloned());
            }
        }
        Ok(SafraBoard { object: tau.cod(), control: self.control.clone(), sigma }.prune())
    }

    /// Move then Cover. Returns the successor and the fresh chips in control order.
    pub fn tau_successor(
        &self,
        alg: &ActivationAlgebra,
        tau: &TraceMorphism,
        alloc: &mut impl ChipAllocator,
    ) -> Result<(SafraBoard, Vec<Chip>), BoardError> {
        let mut b = self.moved(alg, tau)?;
        let alpha = alg.alpha();
        let mut in_use: BTreeSet<Chip> = b.control.iter().copied().collect();
        let mut fresh = Vec::new();
        for y in b.object.elements() {
            let Some(landed) = b.sigma.remove(&(y, alpha)) else { continue };
            let g = alloc.allocate(&in_use).ok_or(BoardError::SupplyExhausted)?;
            in_use.insert(g);
            fresh.push(g);
            let cell = b.sigma.entry((y, Elem::ZERO)).or_default();
            for mut s in landed {
                s.push(g);
                cell.insert(s);
            }
        }
        b.control.extend(&fresh);
        Ok((b, fresh))
    }

    /// Keeps exactly the stacks in `keep`; other cells are emptied.
    pub fn weaken(&self, keep: &BTreeMap<Cell, BTreeSet<Stack>>) -> Result<SafraBoard, BoardError> {
        for (cell, ks) in keep {
            let have = self.sigma.get(cell);
            if !ks.iter().all(|s| have.is_some_and(|h| h.contains(s))) {
                return Err(BoardError::NotASubset);
            }
        }
        Ok(SafraBoard { object: self.object, control: self.control.clone(), sigma: keep.clone() }.prune())
    }

    /// Keeps the `<_Θ`-least stack of every cell.
    pub fn thin(&self) -> SafraBoard {
        let sigma = self
            .sigma
            .iter()
            .map(|(cell, stacks)| {
                let least = stacks.iter().min_by(|a, b| self.cmp_stacks(a, b)).unwrap().clone();
                (*cell, BTreeSet::from([least]))
            })
            .collect();
        SafraBoard { object: self.object, control: self.control.clone(), sigma }.prune()
    }

    /// Truncates every stack containing the covered chip `gamma` to its
    /// part at or below `gamma`.
    pub fn reset(&self, gamma: Chip) -> Result<SafraBoard, BoardError> {
        if !self.contains_chip(gamma) {
            return Err(BoardError::UnknownChip(gamma));
        }
        if !self.is_covered(gamma) {
            return Err(BoardError::NotCovered(gamma));
        }
        let sigma = self
            .sigma
            .iter()
            .map(|(cell, stacks)| {
                let out = stacks
                    .iter()
                    .map(|s| match s.iter().position(|&c| c == gamma) {
                        Some(i) => s[..=i].to_vec(),
                        None => s.clone(),
                    })
                    .collect();
                (*cell, out)
            })
            .collect();
        Ok(SafraBoard { object: self.object, control: self.control.clone(), sigma }.prune())
    }

    /// Adds the empty stack to `(x, 0)` for each selected `x`.
    pub fn populate(&self, cells: &BTreeSet<u32>) -> Result<SafraBoard, BoardError> {
        let mut b = self.clone();
        for &x in cells {
            if x >= self.object.size {
                return Err(BoardError::Malformed("cell outside the board"));
            }
            b.sigma.entry((x, Elem::ZERO)).or_default().insert(Vec::new());
        }
        Ok(b)
    }

    /// Elements whose `(x, 0)` cell is empty.
    pub fn empty_zero_cells(&self) -> BTreeSet<u32> {
        self.object.elements().filter(|&x| !self.sigma.contains_key(&(x, Elem::ZERO))).collect()
    }

    pub fn is_k_sparse(&self, alg: &ActivationAlgebra, k: u32) -> bool {
        let limit = supply_size(alg, k);
        self.control.iter().all(|&c| c < limit)
            && self.control.len() <= (k as usize) * alg.len()
            && self.sigma.values().all(|s| s.len() <= 1)
            && !self.sigma.keys().any(|&(_, a)| a == alg.alpha())
    }

    /// Renames chips; chips missing from `map` are kept.
    pub fn rename(&self, map: &BTreeMap<Chip, Chip>) -> SafraBoard {
        let f = |c: &Chip| *map.get(c).unwrap_or(c);
        SafraBoard {
            object: self.object,
            control: self.control.iter().map(f).collect(),
            sigma: self.sigma.iter().map(|(k, v)| (*k, v.iter().map(|s| s.iter().map(f).collect()).collect())).collect(),
        }
    }

    /// Compact rendering: `Θ | x,a: stacks; …`.
    pub fn render(&self) -> String {
        let mut out = String::from("[");
        for (i, c) in self.control.iter().enumerate() {
            let _ = write!(out, "{}{c}", if i > 0 { " " } else { "" });
        }
        out.push_str("] |");
        for (i, ((x, a), stacks)) in self.sigma.iter().enumerate() {
            let _ = write!(out, "{} {x},{a}:", if i > 0 { ";" } else { "" });
            for s in stacks {
                out.push_str(" {");
                for (j, c) in s.iter().enumerate() {
                    let _ = write!(out, "{}{c}", if j > 0 { " " } else { "" });
                }
                out.push('}');
            }
        }
        out
    }
}

/// One greedy step: resets of all covered chips in descending control
/// order, population of every empty `(x, 0)`, the `τ`-successor with fresh
/// chips from `K̄ \ Θ₀`, and thinning.
pub fn greedy_step(
    alg: &ActivationAlgebra,
    b: &SafraBoard,
    tau: &TraceMorphism,
    k: u32,
) -> Result<(SafraBoard, Transcript), BoardError> {
    let mut t = Transcript::default();
    let next = greedy_inner(alg, b, tau, k, Some(&mut t))?;
    Ok((next, t))
}

/// [`greedy_step`] without recording a transcript.
pub fn greedy_next(alg: &ActivationAlgebra, b: &SafraBoard, tau: &TraceMorphism, k: u32) -> Result<SafraBoard, BoardError> {
    greedy_inner(alg, b, tau, k, None)
}

fn greedy_inner(
    alg: &ActivationAlgebra,
    b: &SafraBoard,
    tau: &TraceMorphism,
    k: u32,
    mut t: Option<&mut Transcript>,
) -> Result<SafraBoard, BoardError> {
    if tau.dom() != b.object {
        return Err(BoardError::ObjectMismatch { board: b.object, morphism: tau.dom() });
    }
    let mut cur = b.clone();
    for &g in b.covered_chips().iter().rev() {
        let next = cur.reset(g)?;
        if let Some(t) = t.as_deref_mut() {
            t.push(TransitionKind::Reset(g), &cur, &next);
        }
        cur = next;
    }
    let empty = cur.empty_zero_cells();
    if !empty.is_empty() {
        let next = cur.populate(&empty)?;
        if let Some(t) = t.as_deref_mut() {
            t.push(TransitionKind::Pop, &cur, &next);
        }
        cur = next;
    }
    let mut supply = ChipSupply::bounded(supply_size(alg, k), b.control.iter().copied().collect());
    let (moved, _) = cur.tau_successor(alg, tau, &mut supply)?;
    if let Some(t) = t.as_deref_mut() {
        t.push(TransitionKind::Tau, &cur, &moved);
    }
    let thin = moved.thin();
    if let Some(t) = t {
        t.push(TransitionKind::Thin, &moved, &thin);
    }
    Ok(thin)
}
