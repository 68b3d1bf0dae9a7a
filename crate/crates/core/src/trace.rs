//! The trace category: finite objects and algebra-labelled relations.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::algebra::{ActivationAlgebra, Elem};

/// A reference to a trace object: identity plus element count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Obj {
    pub id: u32,
    pub size: u32,
}

impl Obj {
    pub fn new(id: u32, size: u32) -> Self {
        Obj { id, size }
    }

    pub fn elements(self) -> core::ops::Range<u32> {
        0..self.size
    }
}

/// A trace object with display names for its elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceObject {
    pub obj: Obj,
    pub names: Vec<String>,
}

impl TraceObject {
    pub fn new(id: u32, names: Vec<String>) -> Self {
        TraceObject { obj: Obj::new(id, names.len() as u32), names }
    }

    pub fn names_distinct(&self) -> bool {
        let set: BTreeSet<&String> = self.names.iter().collect();
        set.len() == self.names.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("object mismatch: {0:?} vs {1:?}")]
    ObjectMismatch(Obj, Obj),
    #[error("triple ({0}, {1}, {2}) out of range")]
    OutOfRange(u32, u8, u32),
}

/// A relation `R ⊆ X × A × Y`, kept sorted by `(x, a, y)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TraceMorphism {
    dom: Obj,
    cod: Obj,
    triples: Vec<(u32, Elem, u32)>,
}

impl TraceMorphism {
    pub fn new(
        alg: &ActivationAlgebra,
        dom: Obj,
        cod: Obj,
        triples: impl IntoIterator<Item = (u32, Elem, u32)>,
    ) -> Result<Self, TraceError> {
        let set: BTreeSet<_> = triples.into_iter().collect();
        for &(x, a, y) in &set {
            if x >= dom.size || y >= cod.size || !alg.contains(a) {
                return Err(TraceError::OutOfRange(x, a.0, y));
            }
        }
        Ok(TraceMorphism { dom, cod, triples: set.into_iter().collect() })
    }

    pub fn identity(x: Obj) -> Self {
        TraceMorphism { dom: x, cod: x, triples: x.elements().map(|e| (e, Elem::ZERO, e)).collect() }
    }

    pub fn dom(&self) -> Obj {
        self.dom
    }

    pub fn cod(&self) -> Obj {
        self.cod
    }

    pub fn triples(&self) -> &[(u32, Elem, u32)] {
        &self.triples
    }

    pub fn contains(&self, x: u32, a: Elem, y: u32) -> bool {
        self.triples.binary_search(&(x, a, y)).is_ok()
    }

    /// Triples leaving `x`.
    pub fn from(&self, x: u32) -> &[(u32, Elem, u32)] {
        let lo = self.triples.partition_point(|t| t.0 < x);
        let hi = self.triples.partition_point(|t| t.0 <= x);
        &self.triples[lo..hi]
    }
}

/// `r` followed by `r2`.
pub fn compose(
    alg: &ActivationAlgebra,
    r: &TraceMorphism,
    r2: &TraceMorphism,
) -> Result<TraceMorphism, TraceError> {
    if r.cod != r2.dom {
        return Err(TraceError::ObjectMismatch(r.cod, r2.dom));
    }
    let mut out = BTreeSet::new();
    for &(x, a, y) in &r.triples {
        for &(_, b, z) in r2.from(y) {
            out.insert((x, alg.join(a, b), z));
        }
    }
    Ok(TraceMorphism { dom: r.dom, cod: r2.cod, triples: out.into_iter().collect() })
}

pub fn is_valid_path<'a>(seq: impl IntoIterator<Item = &'a TraceMorphism>) -> bool {
    let mut prev: Option<Obj> = None;
    for m in seq {
        if let Some(p) = prev {
            if p != m.dom {
                return false;
            }
        }
        prev = Some(m.cod);
    }
    true
}
