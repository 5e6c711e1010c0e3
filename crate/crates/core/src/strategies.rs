//! The proven configurations and their bundled strategy tables.
//!
//! Player two holds the draw on 3×3 and 4×4; player one wins on 5×5. The
//! tables under `strategies/` were produced by [`extract_strategy`] with
//! [`derivation_config`] and are checked by the test suite.
//!
//! [`extract_strategy`]: crate::solver::extract_strategy

use std::path::{Path, PathBuf};

use crate::board::Player;
use crate::rules::{MoveOrdering, RuleConfig};
use crate::solver::{MaxMovesPolicy, SearchConfig, StrategyError, StrategyTable};

/// Environment variable naming a directory of strategy files that take
/// precedence over the bundled ones.
pub const STRATEGY_DIR_ENV: &str = "SQGAME_STRATEGY_DIR";

const N3_P2: &str = include_str!("../strategies/n3-p2.strategy");
const N4_P2: &str = include_str!("../strategies/n4-p2.strategy");
const N5_P1: &str = include_str!("../strategies/n5-p1.strategy");

/// The side with a proven strategy on an `n × n` board, if any.
pub fn guaranteed_side(n: usize) -> Option<Player> {
    match n {
        3 | 4 => Some(Player::Two),
        5 => Some(Player::One),
        _ => None,
    }
}

/// Search settings the bundled table for `n` was derived with.
pub fn derivation_config(n: usize) -> SearchConfig {
    let mut cfg = SearchConfig::new(n);
    if n == 5 {
        cfg.max_moves = MaxMovesPolicy::PaperN5;
        cfg.rules = RuleConfig {
            move_ordering: MoveOrdering::CenterOut,
            ..RuleConfig::default()
        };
    }
    cfg
}

/// File name used for the table of `side` on an `n × n` board.
pub fn file_name(n: usize, side: Player) -> String {
    format!("n{n}-{}.strategy", side.label())
}

pub fn bundled(n: usize, side: Player) -> Option<StrategyTable> {
    let text = match (n, side) {
        (3, Player::Two) => N3_P2,
        (4, Player::Two) => N4_P2,
        (5, Player::One) => N5_P1,
        _ => return None,
    };
    Some(StrategyTable::parse(text).expect("bundled strategy table is well-formed"))
}

/// Looks for `n{n}-{side}.strategy` in `dir` (or in `$SQGAME_STRATEGY_DIR`
/// when `dir` is `None`), falling back to the bundled table.
pub fn load(n: usize, side: Player, dir: Option<&Path>) -> Result<Option<StrategyTable>, StrategyError> {
    let dir: Option<PathBuf> = dir
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(STRATEGY_DIR_ENV).map(PathBuf::from));
    if let Some(dir) = dir {
        let path = dir.join(file_name(n, side));
        if path.is_file() {
            return StrategyTable::load(path).map(Some);
        }
    }
    Ok(bundled(n, side))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_tables_parse() {
        for n in 3..=5 {
            let side = guaranteed_side(n).unwrap();
            let t = bundled(n, side).unwrap();
            assert_eq!((t.n, t.side), (n, side));
            assert_eq!(t.rules, derivation_config(n).rules);
            assert_eq!(t.max_moves, derivation_config(n).max_moves);
        }
        assert!(bundled(5, Player::Two).is_none());
        assert!(guaranteed_side(6).is_none());
    }

    #[test]
    fn directory_overrides_bundle() {
        let dir = std::env::temp_dir().join(format!("sqgame-strategies-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let mut t = bundled(3, Player::Two).unwrap();
        t.bound = 7;
        t.save(dir.join(file_name(3, Player::Two))).unwrap();
        assert_eq!(load(3, Player::Two, Some(&dir)).unwrap().unwrap().bound, 7);
        assert_eq!(load(4, Player::Two, Some(&dir)).unwrap().unwrap().n, 4);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
