//! Bisimulation games on first-order grammars: equivalence levels,
//! Defender strategies and their checkers, judgment well-formedness, and a
//! reproducible counterexample report.

pub mod game;
pub mod grammar;
pub mod judgment;
pub mod repro;
pub mod strategy;
