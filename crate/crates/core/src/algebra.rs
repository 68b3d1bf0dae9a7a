//! Finite activation algebras: join-semilattices with zero and a marked
//! activation element.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Largest carrier we accept.
pub const MAX_ELEMENTS: usize = 16;

/// An element id. Zero is always `Elem(0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub u8);

impl Elem {
    pub const ZERO: Elem = Elem(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("law {law} violated at {witnesses:?}")]
    Violation { law: &'static str, witnesses: Vec<u8> },
    #[error("unknown element {0}")]
    UnknownElement(u8),
}

/// A finite join-semilattice `(A, ∨, 0)` with activation element `α ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActivationAlgebra {
    names: Vec<String>,
    table: Vec<u8>,
    alpha: Elem,
}

/// Checks the semilattice laws on a raw square table. Returns the first
/// violated law.
pub fn check_laws(table: &[Vec<u8>], alpha: u8) -> Result<(), AlgebraError> {
    let n = table.len();
    let v = |law, w: &[usize]| AlgebraError::Violation {
        law,
        witnesses: w.iter().map(|&x| x as u8).collect(),
    };
    if n == 0 || n > MAX_ELEMENTS {
        return Err(v("size", &[n]));
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(v("total", &[i]));
        }
        if let Some(j) = row.iter().position(|&c| c as usize >= n) {
            return Err(v("closed", &[i, j]));
        }
    }
    if alpha as usize >= n {
        return Err(AlgebraError::UnknownElement(alpha));
    }
    if alpha == 0 {
        return Err(v("alpha≠0", &[0]));
    }
    let j = |a: usize, b: usize| table[a][b] as usize;
    for a in 0..n {
        if j(a, a) != a {
            return Err(v("idempotent", &[a]));
        }
        if j(0, a) != a {
            return Err(v("zero", &[a]));
        }
        for b in 0..n {
            if j(a, b) != j(b, a) {
                return Err(v("commutative", &[a, b]));
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if j(j(a, b), c) != j(a, j(b, c)) {
                    return Err(v("associative", &[a, b, c]));
                }
            }
        }
    }
    Ok(())
}

impl ActivationAlgebra {
    /// Builds an algebra after checking every law.
    pub fn new(names: Vec<String>, table: Vec<Vec<u8>>, alpha: u8) -> Result<Self, AlgebraError> {
        check_laws(&table, alpha)?;
        if names.len() != table.len() {
            return Err(AlgebraError::Violation { law: "names", witnesses: Vec::new() });
        }
        Ok(ActivationAlgebra { names, table: table.concat(), alpha: Elem(alpha) })
    }

    fn chain(n: u8, alpha: u8) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| a.max(b)).collect()).collect();
        let names = (0..n).map(|i| i.to_string()).collect();
        Self::new(names, table, alpha).expect("max tables are semilattices")
    }

    /// 𝔹: `{0,1}` with max and `α = 1`.
    pub fn boolean() -> Self {
        Self::chain(2, 1)
    }

    /// 𝔽: `{0,1,2}` with max and `α = 1`; 2 marks failure.
    pub fn failure() -> Self {
        Self::chain(3, 1)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn alpha(&self) -> Elem {
        self.alpha
    }

    pub fn name(&self, a: Elem) -> &str {
        &self.names[a.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.len() as u8).map(Elem)
    }

    pub fn contains(&self, a: Elem) -> bool {
        a.index() < self.len()
    }

    /// Table lookup; callers guarantee membership.
    #[inline]
    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.table[a.index() * self.len() + b.index()])
    }

    pub fn try_join(&self, a: Elem, b: Elem) -> Result<Elem, AlgebraError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.join(a, b))
    }

    pub fn leq(&self, a: Elem, b: Elem) -> Result<bool, AlgebraError> {
        Ok(self.try_join(a, b)? == b)
    }

    pub fn check(&self, a: Elem) -> Result<(), AlgebraError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(AlgebraError::UnknownElement(a.0))
        }
    }

    /// Row-major join table.
    pub fn table(&self) -> Vec<Vec<u8>> {
        self.table.chunks(self.len()).map(|r| r.to_vec()).collect()
    }

    /// Re-checks the laws; always `Ok` for values built through [`Self::new`].
    pub fn validate(&self) -> Result<(), AlgebraError> {
        check_laws(&self.table(), self.alpha.0)
    }
}
