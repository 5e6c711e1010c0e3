//! Strategy tables and their text file format.
//!
//! A table maps canonical board states to the strategy player's move,
//! expressed in the canonical frame. The file format is line oriented:
//!
//! ```text
//! sqgame-strategy 1
//! n <size>
//! side <p1|p2>
//! rules symmetry=<on|off> diagonal=<on|off> useful=<none|n:p,...> ordering=<row-major|center-out>
//! max-moves <paper-n5|none|fixed(k)>
//! bound <max game length over all verified lines>
//! entries <count>
//! <state> <r> <c>
//! ...
//! ```
//!
//! Header keys appear exactly once and in this order. Each entry line holds
//! an `n*n` character state string over `0`, `1`, `2`, followed by the row
//! and column of the move, separated by single spaces. Entries are sorted by
//! state string. Lines end with `\n`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

use super::search::MaxMovesPolicy;
use crate::board::{Cell, Grid, Player, Position};
use crate::rules::RuleConfig;
use crate::symmetry::canonical_form;

pub const STRATEGY_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "sqgame-strategy";

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("strategy file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("strategy file i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyTable {
    pub n: usize,
    pub side: Player,
    pub version: u32,
    pub rules: RuleConfig,
    pub max_moves: MaxMovesPolicy,
    /// Longest verified game line, in moves.
    pub bound: usize,
    pub entries: BTreeMap<String, Position>,
}

impl StrategyTable {
    pub fn new(n: usize, side: Player, rules: RuleConfig, max_moves: MaxMovesPolicy) -> Self {
        StrategyTable {
            n,
            side,
            version: STRATEGY_FORMAT_VERSION,
            rules,
            max_moves,
            bound: n * n,
            entries: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The table's move for `g`, mapped back from the canonical frame.
    pub fn lookup(&self, g: &Grid) -> Option<Position> {
        if g.n() != self.n {
            return None;
        }
        let (key, t) = canonical_form(g);
        self.entries.get(&key).map(|&q| t.inverse().apply(q, self.n))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{MAGIC} {}\n", self.version));
        out.push_str(&format!("n {}\n", self.n));
        out.push_str(&format!("side {}\n", self.side.label()));
        out.push_str(&format!("rules {}\n", self.rules));
        out.push_str(&format!("max-moves {}\n", self.max_moves));
        out.push_str(&format!("bound {}\n", self.bound));
        out.push_str(&format!("entries {}\n", self.entries.len()));
        for (state, p) in &self.entries {
            out.push_str(&format!("{state} {} {}\n", p.r, p.c));
        }
        out
    }

    pub fn parse(text: &str) -> Result<StrategyTable, StrategyError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let err = |line: usize, msg: String| StrategyError::Parse { line, msg };
        let mut header = |key: &str| -> Result<(usize, String), StrategyError> {
            let (no, line) = lines
                .next()
                .ok_or_else(|| err(0, format!("missing header {key:?}")))?;
            let value = line
                .strip_prefix(key)
                .and_then(|rest| rest.strip_prefix(' '))
                .ok_or_else(|| err(no, format!("expected {key:?} header")))?;
            Ok((no, value.to_string()))
        };

        let (no, version) = header(MAGIC)?;
        let version: u32 = version.parse().map_err(|_| err(no, "bad version".into()))?;
        if version != STRATEGY_FORMAT_VERSION {
            return Err(err(no, format!("unsupported format version {version}")));
        }
        let (no, n) = header("n")?;
        let n: usize = n.parse().map_err(|_| err(no, "bad board size".into()))?;
        if !(1..=16).contains(&n) {
            return Err(err(no, format!("board size {n} out of range")));
        }
        let (no, side) = header("side")?;
        let side = Player::parse(&side).ok_or_else(|| err(no, format!("bad side {side:?}")))?;
        let (no, rules) = header("rules")?;
        let rules: RuleConfig = rules.parse().map_err(|m| err(no, m))?;
        let (no, max_moves) = header("max-moves")?;
        let max_moves: MaxMovesPolicy = max_moves.parse().map_err(|m| err(no, m))?;
        let (no, bound) = header("bound")?;
        let bound: usize = bound.parse().map_err(|_| err(no, "bad bound".into()))?;
        let (no, count) = header("entries")?;
        let count: usize = count.parse().map_err(|_| err(no, "bad entry count".into()))?;

        let mut entries = BTreeMap::new();
        for (no, line) in lines {
            let mut parts = line.split(' ');
            let (Some(state), Some(r), Some(c), None) = (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(err(no, "expected `<state> <r> <c>`".into()));
            };
            let grid = Grid::decode(n, state).map_err(|e| err(no, e.to_string()))?;
            let r: usize = r.parse().map_err(|_| err(no, "bad row".into()))?;
            let c: usize = c.parse().map_err(|_| err(no, "bad column".into()))?;
            if r >= n || c >= n {
                return Err(err(no, format!("move ({r},{c}) off the board")));
            }
            let p = Position::new(r, c);
            if grid.cell(p) != Cell::Empty {
                return Err(err(no, format!("move {p} is on an occupied cell")));
            }
            if entries.insert(state.to_string(), p).is_some() {
                return Err(err(no, format!("duplicate state {state}")));
            }
        }
        if entries.len() != count {
            return Err(err(
                0,
                format!("header announces {count} entries, found {}", entries.len()),
            ));
        }
        Ok(StrategyTable {
            n,
            side,
            version,
            rules,
            max_moves,
            bound,
            entries,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<StrategyTable, StrategyError> {
        StrategyTable::parse(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), StrategyError> {
        fs::write(path, self.to_text())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::Transform;

    fn sample() -> StrategyTable {
        let mut t = StrategyTable::new(3, Player::Two, RuleConfig::default(), MaxMovesPolicy::None);
        t.entries.insert("000000001".into(), Position::new(1, 1));
        t.entries.insert("000010000".into(), Position::new(0, 0));
        t.bound = 9;
        t
    }

    #[test]
    fn text_round_trip() {
        let t = sample();
        let text = t.to_text();
        assert!(text.starts_with("sqgame-strategy 1\nn 3\nside p2\n"));
        assert!(text.ends_with("000000001 1 1\n000010000 0 0\n"));
        assert_eq!(StrategyTable::parse(&text).unwrap(), t);
    }

    #[test]
    fn rejects_bad_files() {
        let text = sample().to_text();
        assert!(StrategyTable::parse("").is_err());
        assert!(StrategyTable::parse(&text.replace("entries 2", "entries 3")).is_err());
        assert!(StrategyTable::parse(&text.replace("000010000 0 0", "000010000 1 1")).is_err());
        assert!(StrategyTable::parse(&text.replace("000010000 0 0", "00001000 0 0")).is_err());
        assert!(StrategyTable::parse(&text.replace("side p2", "side p3")).is_err());
        assert!(StrategyTable::parse(&text.replace("000010000 0 0", "000010000 0 7")).is_err());
    }

    #[test]
    fn lookup_follows_symmetry() {
        let t = sample();
        // the table stores the canonical corner stone at (2,2)
        let g = Grid::with_stones(3, &[(0, 0)], &[]);
        assert_eq!(t.lookup(&g), Some(Position::new(1, 1)));
        let mut t2 = sample();
        t2.entries.insert("000000001".into(), Position::new(0, 1));
        for tr in Transform::ALL {
            let base = Grid::with_stones(3, &[(2, 2)], &[]);
            let moved = base.transform(tr);
            let m = t2.lookup(&moved).unwrap();
            assert_eq!(moved.cell(m), Cell::Empty);
            // the answer is an image of the stored move under a map taking
            // the canonical state to this one
            let (_, canon) = canonical_form(&moved);
            assert_eq!(canon.apply(m, 3), Position::new(0, 1));
        }
    }
}
