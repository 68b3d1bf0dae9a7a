//! Cyclic proofs with trace conditions over activation algebras.
//!
//! The crate provides activation algebras and their trace category, cyclic
//! preproofs, Safra boards with the Büchi and Safra automata built on them, a
//! decision procedure for the global trace condition, the generated reset and
//! proof-search systems, and two concrete instances (cyclic Gödel's T and the
//! modal μ-calculus).
//!
//! Everything here is `no_std` with `alloc`; IO and the command line front end
//! live in the `resetproof` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod automata;
pub mod board;
pub mod cgt;
pub mod corpus;
pub mod gtc;
pub mod instance;
pub mod mu;
pub mod proof;
pub mod reset;
pub mod search;
pub mod trace;

pub use algebra::{ActivationAlgebra, AlgebraError, Elem};
pub use board::{Chip, SafraBoard};
pub use proof::{Address, DerivationSystem, Preproof, RuleId, SequentId};
pub use trace::{Obj, TraceMorphism};
