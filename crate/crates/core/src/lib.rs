//! Exact cost allocation for set covering games.
//!
//! Given a set covering instance (players, cover sets, nonnegative rational
//! costs), this crate computes the unique allocation that distributes the
//! fractional cover optimum and lexicographically maximizes the sorted vector
//! of coalition excesses. The computation runs over a small explicit family
//! of coalition/set pairs, so it needs only polynomially many exact LP
//! solves; brute-force oracles over all coalitions are included for
//! verification at small sizes, together with instance generators (chains,
//! triangles, vehicle routing tours, adversarial cost functions).
//!
//! Everything is exact rational arithmetic end to end.

pub mod families;
pub mod generators;
pub mod lp;
pub mod model;
pub mod mps;
pub mod oracle;
pub mod rational;
pub mod solver;

pub mod checks;

#[cfg(test)]
pub(crate) mod testkit;

pub use model::{Allocation, Coalition, CoverSet, SetCoverInstance};
pub use rational::Rational;
