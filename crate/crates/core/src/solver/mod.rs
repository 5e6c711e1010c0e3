//! Backtracking search over the disciplined game, strategy extraction and
//! exhaustive strategy verification.

mod oracle;
mod search;
mod strategy;
mod verify;

pub use oracle::{oracle_minimax, oracle_value, GameValue, OracleError};
pub use search::{
    extract_strategy, max_moves_for, solve, solve_with, MaxMovesPolicy, NoObserver, Outcome,
    SearchConfig, SearchError, SearchObserver, SearchReport,
};
pub use strategy::{StrategyError, StrategyTable, STRATEGY_FORMAT_VERSION};
pub use verify::{verify_strategy, VerificationReport, VerificationResult};
