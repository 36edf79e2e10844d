//! Exact coadjoint-orbit invariants of nilpotent Lie algebras and checkers
//! for stepwise decompositions.

pub mod catalog;
pub mod coadjoint;
pub mod lie;
pub mod linalg;
pub mod stepwise;
pub mod suites;
