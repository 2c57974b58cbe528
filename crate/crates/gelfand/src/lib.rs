//! Exact character algebras of finite Gelfand pairs.
//!
//! Given a pair of finite groups `H ⊂ G` presented by permutation generators,
//! this crate computes the complete invariant of the pair's Hecke algebra — the
//! triple `(A, B, C)` of suborbit sizes, irreducible multiplicity dimensions and
//! the exact change-of-basis matrix between the two idempotent bases — entirely
//! in cyclotomic arithmetic, then applies the duality transform, integrality
//! tests and catalog searches on top of it.
//!
//! The narrative guide lives in `book/`; its code snippets compile and run as
//! doc-tests of this crate (see [`guide`]).

pub mod cyclo;
pub mod perm;
pub mod scheme;
pub mod spectral;
pub mod triples;
pub mod catalog;
pub mod heckemaps;
pub mod cli;

pub mod guide;

pub use cyclo::CycNum;
pub use perm::{GroupPair, PermGroup, Permutation};
pub use scheme::OrbitalScheme;
pub use spectral::CharacterTriple;
