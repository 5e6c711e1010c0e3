//! Plain minimax over the raw game: alternate moves, first square wins,
//! full board is a draw. No forced-move shortcuts and no move restrictions,
//! so it serves as an independent check on the disciplined search.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{Grid, Player};
use crate::symmetry::canonical_transform;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GameValue {
    P1Win,
    P2Win,
    Draw,
}

impl GameValue {
    fn from_score(score: i8) -> GameValue {
        match score {
            1 => GameValue::P1Win,
            -1 => GameValue::P2Win,
            _ => GameValue::Draw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("the minimax oracle only handles n <= 4, got {0}")]
    TooLarge(usize),
    #[error("board size must be positive")]
    Empty,
}

struct Minimax {
    /// Only used for n = 4; keyed by base-3 code of the canonical image.
    memo: Option<HashMap<u64, i8>>,
}

impl Minimax {
    fn key(g: &Grid) -> u64 {
        let t = canonical_transform(g);
        let n = g.n();
        let cells = g.cells();
        let mut code = 0u64;
        for idx in 0..n * n {
            let src = t.inverse().apply(crate::board::Position::from_index(idx, n), n).index(n);
            code = code * 3 + cells[src] as u64;
        }
        code
    }

    /// Score from player one's view: 1 win, 0 draw, -1 loss.
    fn score(&mut self, g: &mut Grid, mover: Player) -> i8 {
        if g.completed_square(Player::One).is_some() {
            return 1;
        }
        if g.completed_square(Player::Two).is_some() {
            return -1;
        }
        if g.is_full() {
            return 0;
        }
        let key = self.memo.as_ref().map(|_| Minimax::key(g));
        if let (Some(memo), Some(k)) = (self.memo.as_ref(), key) {
            if let Some(&v) = memo.get(&k) {
                return v;
            }
        }
        let n = g.n();
        let (target, mut best) = match mover {
            Player::One => (1, -1),
            Player::Two => (-1, 1),
        };
        for idx in 0..n * n {
            if g.cell_at(idx) != crate::board::Cell::Empty {
                continue;
            }
            g.push(idx, mover);
            let v = self.score(g, mover.opponent());
            g.pop();
            best = match mover {
                Player::One => best.max(v),
                Player::Two => best.min(v),
            };
            if best == target {
                break;
            }
        }
        if let (Some(memo), Some(k)) = (self.memo.as_mut(), key) {
            memo.insert(k, best);
        }
        best
    }
}

/// Exact value of the raw game from the empty `n × n` board.
pub fn oracle_minimax(n: usize) -> Result<GameValue, OracleError> {
    if n == 0 {
        return Err(OracleError::Empty);
    }
    if n > 4 {
        return Err(OracleError::TooLarge(n));
    }
    oracle_value(&Grid::new(n))
}

/// Exact value of the raw game from `g`, with the mover given by stone
/// parity (player one to move on an even count).
pub fn oracle_value(g: &Grid) -> Result<GameValue, OracleError> {
    let n = g.n();
    if n > 4 {
        return Err(OracleError::TooLarge(n));
    }
    let mut mm = Minimax {
        memo: (n == 4).then(HashMap::new),
    };
    let mut work = g.clone();
    let mover = work.to_move();
    Ok(GameValue::from_score(mm.score(&mut work, mover)))
}
