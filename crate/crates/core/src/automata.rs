//! The Büchi automaton `𝔅(𝒜, M)` and the Safra automaton `𝔖(𝒜, S, M)`,
//! with membership tests for ultimately periodic words.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::algebra::{ActivationAlgebra, Elem};
use crate::board::{greedy_next, supply_size, Chip, SafraBoard};
use crate::proof::scc;
use crate::trace::{Obj, TraceMorphism};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AutomataError {
    #[error("letter {0} is not in the alphabet")]
    UnknownLetter(usize),
    #[error("object {0:?} is not among the automaton's objects")]
    ObjectNotInO(Obj),
    #[error("the loop of a lasso must be nonempty")]
    EmptyLoop,
}

/// The value carried along a trace; `Star` is the adjoined `0*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mark {
    Val(Elem),
    Star,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BuchiState {
    /// Waiting before a trace starts.
    Object(Obj),
    /// Following element `x` of `obj` with accumulated `mark`.
    Track { obj: Obj, x: u32, mark: Mark },
}

#[derive(Clone, Debug)]
pub struct BuchiAutomaton {
    alphabet: Vec<TraceMorphism>,
    states: Vec<BuchiState>,
    /// `delta[q][letter]` lists successor states.
    delta: Vec<Vec<Vec<usize>>>,
    initial: Vec<usize>,
    accepting: Vec<bool>,
}

fn objects_of(m: &[TraceMorphism]) -> BTreeSet<Obj> {
    m.iter().flat_map(|r| [r.dom(), r.cod()]).collect()
}

pub fn build_buchi(alg: &ActivationAlgebra, m: Vec<TraceMorphism>) -> BuchiAutomaton {
    let objects = objects_of(&m);
    let mut states = Vec::new();
    for &o in &objects {
        states.push(BuchiState::Object(o));
    }
    for &o in &objects {
        for x in o.elements() {
            for a in alg.elements() {
                states.push(BuchiState::Track { obj: o, x, mark: Mark::Val(a) });
            }
            states.push(BuchiState::Track { obj: o, x, mark: Mark::Star });
        }
    }
    let index: BTreeMap<BuchiState, usize> = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let alpha = alg.alpha();
    let mark = |v: Elem| if v == alpha { Mark::Star } else { Mark::Val(v) };
    let delta = states
        .iter()
        .map(|q| {
            m.iter()
                .map(|r| {
                    let (dx, cy) = (r.dom(), r.cod());
                    let mut out = BTreeSet::new();
                    match *q {
                        BuchiState::Object(o) if o == dx => {
                            out.insert(index[&BuchiState::Object(cy)]);
                            for y in cy.elements() {
                                out.insert(index[&BuchiState::Track { obj: cy, x: y, mark: Mark::Val(Elem::ZERO) }]);
                            }
                        }
                        BuchiState::Track { obj, x, mark: mk } if obj == dx => {
                            for &(_, b, y) in r.from(x) {
                                let next = match mk {
                                    Mark::Val(a) => mark(alg.join(a, b)),
                                    Mark::Star => mark(b),
                                };
                                out.insert(index[&BuchiState::Track { obj: cy, x: y, mark: next }]);
                            }
                        }
                        _ => {}
                    }
                    out.into_iter().collect()
                })
                .collect()
        })
        .collect();
    let initial = (0..objects.len()).collect();
    let accepting = states.iter().map(|s| matches!(s, BuchiState::Track { mark: Mark::Star, .. })).collect();
    BuchiAutomaton { alphabet: m, states, delta, initial, accepting }
}

impl BuchiAutomaton {
    pub fn alphabet(&self) -> &[TraceMorphism] {
        &self.alphabet
    }

    pub fn states(&self) -> &[BuchiState] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.delta
            .iter()
            .enumerate()
            .flat_map(|(q, row)| row.iter().enumerate().flat_map(move |(l, ss)| ss.iter().map(move |&s| (q, l, s))))
    }

    fn check(&self, word: &[usize]) -> Result<(), AutomataError> {
        match word.iter().find(|&&l| l >= self.alphabet.len()) {
            Some(&l) => Err(AutomataError::UnknownLetter(l)),
            None => Ok(()),
        }
    }

    /// Whether some run on `prefix · loop^ω` visits accepting states
    /// infinitely often.
    pub fn accepts_lasso(&self, prefix: &[usize], lp: &[usize]) -> Result<bool, AutomataError> {
        self.check(prefix)?;
        self.check(lp)?;
        if lp.is_empty() {
            return Err(AutomataError::EmptyLoop);
        }
        let mut cur: BTreeSet<usize> = self.initial.iter().copied().collect();
        for &l in prefix {
            cur = cur.iter().flat_map(|&q| self.delta[q][l].iter().copied()).collect();
        }
        // product nodes q * L + i
        let len = lp.len();
        let n = self.states.len() * len;
        let succ = |v: usize| -> Vec<usize> {
            let (q, i) = (v / len, v % len);
            self.delta[q][lp[i]].iter().map(|&s| s * len + (i + 1) % len).collect()
        };
        let mut seen = vec![false; n];
        let mut queue: VecDeque<usize> = cur.iter().map(|&q| q * len).collect();
        for &v in &queue {
            seen[v] = true;
        }
        while let Some(v) = queue.pop_front() {
            for w in succ(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        let reach: Vec<usize> = (0..n).filter(|&v| seen[v]).collect();
        let local: BTreeMap<usize, usize> = reach.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let comps = scc(reach.len(), |i| succ(reach[i]).into_iter().filter_map(|w| local.get(&w).copied()).collect());
        Ok(comps.iter().any(|c| {
            let nontrivial = c.len() > 1 || succ(reach[c[0]]).contains(&reach[c[0]]);
            nontrivial && c.iter().any(|&i| self.accepting[reach[i] / len])
        }))
    }
}

pub fn buchi_accepts_lasso(aut: &BuchiAutomaton, prefix: &[usize], lp: &[usize]) -> Result<bool, AutomataError> {
    aut.accepts_lasso(prefix, lp)
}

#[derive(Clone, Debug, Default)]
struct Memo {
    states: Vec<SafraBoard>,
    index: BTreeMap<SafraBoard, usize>,
    delta: BTreeMap<(usize, usize), Option<usize>>,
}

impl Memo {
    fn intern(&mut self, b: SafraBoard) -> usize {
        if let Some(&i) = self.index.get(&b) {
            return i;
        }
        self.states.push(b.clone());
        self.index.insert(b, self.states.len() - 1);
        self.states.len() - 1
    }
}

/// The deterministic Safra automaton. States are K-sparse boards (a board
/// knows its object) and are discovered lazily.
///
/// The memo table sits in a `RefCell`: share a value within one thread, or
/// clone it per thread.
#[derive(Clone, Debug)]
pub struct RabinAutomaton {
    alg: ActivationAlgebra,
    alphabet: Vec<TraceMorphism>,
    objects: BTreeSet<Obj>,
    k: u32,
    start: usize,
    memo: RefCell<Memo>,
}

pub fn build_safra_automaton(
    alg: &ActivationAlgebra,
    objects: &BTreeSet<Obj>,
    m: Vec<TraceMorphism>,
    start: Obj,
) -> Result<RabinAutomaton, AutomataError> {
    if !objects.contains(&start) {
        return Err(AutomataError::ObjectNotInO(start));
    }
    if let Some(o) = objects_of(&m).into_iter().find(|o| !objects.contains(o)) {
        return Err(AutomataError::ObjectNotInO(o));
    }
    let k = objects.iter().map(|o| o.size).max().unwrap_or(0);
    let mut memo = Memo::default();
    let start = memo.intern(SafraBoard::empty(start));
    Ok(RabinAutomaton { alg: alg.clone(), alphabet: m, objects: objects.clone(), k, start, memo: RefCell::new(memo) })
}

impl RabinAutomaton {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn algebra(&self) -> &ActivationAlgebra {
        &self.alg
    }

    pub fn alphabet(&self) -> &[TraceMorphism] {
        &self.alphabet
    }

    pub fn objects(&self) -> &BTreeSet<Obj> {
        &self.objects
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// Number of Rabin pairs, one per chip of `K̄`.
    pub fn pair_count(&self) -> u32 {
        supply_size(&self.alg, self.k)
    }

    pub fn state(&self, q: usize) -> SafraBoard {
        self.memo.borrow().states[q].clone()
    }

    pub fn intern(&self, b: SafraBoard) -> usize {
        self.memo.borrow_mut().intern(b)
    }

    pub fn known_states(&self) -> usize {
        self.memo.borrow().states.len()
    }

    /// `δ(q, letter)`; `None` when the letter does not start at `q`'s object.
    pub fn step(&self, q: usize, letter: usize) -> Result<Option<usize>, AutomataError> {
        let tau = self.alphabet.get(letter).ok_or(AutomataError::UnknownLetter(letter))?;
        if let Some(&r) = self.memo.borrow().delta.get(&(q, letter)) {
            return Ok(r);
        }
        let b = self.state(q);
        let next = if b.object() == tau.dom() {
            let nb = greedy_next(&self.alg, &b, tau, self.k).expect("greedy step on a K-sparse board");
            Some(self.memo.borrow_mut().intern(nb))
        } else {
            None
        };
        self.memo.borrow_mut().delta.insert((q, letter), next);
        Ok(next)
    }

    /// `γ ∈ Θ` and `γ` covered.
    pub fn in_good(&self, q: usize, gamma: Chip) -> bool {
        self.memo.borrow().states[q].is_covered(gamma)
    }

    /// `γ ∉ Θ`.
    pub fn in_bad(&self, q: usize, gamma: Chip) -> bool {
        !self.memo.borrow().states[q].contains_chip(gamma)
    }

    /// Whether the set of states `cycle`, visited infinitely often, meets the
    /// Rabin condition.
    pub fn accepting_set(&self, cycle: &BTreeSet<usize>) -> bool {
        (0..self.pair_count()).any(|g| {
            cycle.iter().any(|&q| self.in_good(q, g)) && cycle.iter().all(|&q| !self.in_bad(q, g))
        })
    }

    /// Runs `prefix`, then repeats `loop` until a (state, position) pair
    /// recurs, and tests the states of the resulting cycle.
    pub fn accepts_lasso(&self, prefix: &[usize], lp: &[usize]) -> Result<bool, AutomataError> {
        if lp.is_empty() {
            return Err(AutomataError::EmptyLoop);
        }
        if let Some(&l) = prefix.iter().chain(lp).find(|&&l| l >= self.alphabet.len()) {
            return Err(AutomataError::UnknownLetter(l));
        }
        let mut q = self.start;
        for &l in prefix {
            match self.step(q, l)? {
                Some(n) => q = n,
                None => return Ok(false),
            }
        }
        let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut seq = Vec::new();
        let mut pos = 0;
        loop {
            if let Some(&i) = seen.get(&(q, pos)) {
                let cycle: BTreeSet<usize> = seq[i..].iter().copied().collect();
                return Ok(self.accepting_set(&cycle));
            }
            seen.insert((q, pos), seq.len());
            seq.push(q);
            match self.step(q, lp[pos])? {
                Some(n) => q = n,
                None => return Ok(false),
            }
            pos = (pos + 1) % lp.len();
        }
    }

    /// Breadth-first exploration of all reachable states.
    pub fn explore(&self) -> Vec<usize> {
        let mut seen = BTreeSet::from([self.start]);
        let mut queue = VecDeque::from([self.start]);
        while let Some(q) = queue.pop_front() {
            for l in 0..self.alphabet.len() {
                if let Ok(Some(n)) = self.step(q, l) {
                    if seen.insert(n) {
                        queue.push_back(n);
                    }
                }
            }
        }
        seen.into_iter().collect()
    }
}

pub fn rabin_accepts_lasso(aut: &RabinAutomaton, prefix: &[usize], lp: &[usize]) -> Result<bool, AutomataError> {
    aut.accepts_lasso(prefix, lp)
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

fn powf(base: f64, exp: u32) -> f64 {
    (0..exp).fold(1.0, |acc, _| acc * base)
}

/// The published estimate of `|Sb(𝒜, X, K)|`:
/// `Σ_{C=1}^{K|A|} binom(K(|A|+1), C) · C! · 2^{C·|X|·(|A|−1)}`.
pub fn published_board_bound(alg: &ActivationAlgebra, k: u32, x_size: u32) -> f64 {
    let a = alg.len() as u32;
    (1..=k * a)
        .map(|c| binom(k * (a + 1), c) * factorial(c) * powf(2.0, c * x_size * (a - 1)))
        .sum()
}

/// An upper bound on `|Sb(𝒜, X, K)|` that also counts the empty control
/// and empty cells: each non-α cell holds no stack or one subset of `Θ`.
pub fn board_bound(alg: &ActivationAlgebra, k: u32, x_size: u32) -> f64 {
    let a = alg.len() as u32;
    (0..=k * a)
        .map(|c| binom(k * (a + 1), c) * factorial(c) * powf(powf(2.0, c) + 1.0, x_size * (a - 1)))
        .sum()
}
