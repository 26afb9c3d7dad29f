//! Defender strategies: prefix-closed play sets, their checkers, the
//! extension ordering, composition, and strategy-relative levels.

mod check;
mod intensional;
mod level;
mod playset;

pub use check::{
    check_d, check_dq, check_finite_prefix, check_winning, Condition, StrategyError,
    StrategyVerdict, VerdictReport,
};
pub use intensional::{identity_strategy, materialize, IntensionalStrategy, Strategy};
pub use level::strategy_eq_level;
pub use playset::{extension_leq, indstr, PlaySet, ResidualError, StrategyParseError};

use crate::game::Play;

/// Prefix closure of `plays`.
pub fn make_playset(plays: &[Play]) -> PlaySet {
    PlaySet::from_plays(plays)
}

/// `α \ S`.
pub fn residual(s: &PlaySet, alpha: &Play) -> Result<PlaySet, ResidualError> {
    s.residual(alpha)
}
