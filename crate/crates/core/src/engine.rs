//! A live opponent built from a strategy table.
//!
//! Move choice: the forced cascade first, then the table (through the
//! canonical frame), then a short exhaustive look-ahead, then the first
//! free cell. Only the table step carries a guarantee, and only for the
//! states the table was verified on.

use std::sync::Arc;

use thiserror::Error;

use crate::board::{Cell, Grid, Player, Position};
use crate::rules::{forced_status, game_status, order_moves, ForcedStatus, GameStatus, MoveOrdering};
use crate::solver::StrategyTable;

#[derive(Clone, Debug)]
pub struct EngineProfile {
    pub n: usize,
    pub side: Player,
    pub table: Option<Arc<StrategyTable>>,
    /// Plies of look-ahead when the table has no answer; 0 disables it.
    pub fallback_depth: usize,
}

impl EngineProfile {
    pub fn new(n: usize, side: Player) -> Self {
        EngineProfile {
            n,
            side,
            table: None,
            fallback_depth: default_fallback_depth(n),
        }
    }

    pub fn with_table(mut self, table: Arc<StrategyTable>) -> Result<Self, EngineError> {
        if table.n != self.n || table.side != self.side {
            return Err(EngineError::TableMismatch {
                n: table.n,
                side: table.side,
            });
        }
        self.table = Some(table);
        Ok(self)
    }

    pub fn with_fallback_depth(mut self, depth: usize) -> Self {
        self.fallback_depth = depth;
        self
    }
}

pub fn default_fallback_depth(n: usize) -> usize {
    match n {
        0..=3 => 9,
        4 => 4,
        _ => 3,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("no empty cell left")]
    NoEmptyCell,
    #[error("it is {0}'s turn, not the engine's")]
    NotEnginesTurn(Player),
    #[error("the game is already over")]
    GameOver,
    #[error("board is {got}x{got}, engine plays {want}x{want}")]
    SizeMismatch { want: usize, got: usize },
    #[error("strategy table is for n = {n}, {side}")]
    TableMismatch { n: usize, side: Player },
    #[error("self-play needs two profiles for the same board and opposite sides")]
    ProfileMismatch,
}

/// The engine's move in `g`.
pub fn engine_move(g: &Grid, prof: &EngineProfile) -> Result<Position, EngineError> {
    if g.n() != prof.n {
        return Err(EngineError::SizeMismatch {
            want: prof.n,
            got: g.n(),
        });
    }
    if game_status(g) != GameStatus::Ongoing {
        return Err(if g.is_full() {
            EngineError::NoEmptyCell
        } else {
            EngineError::GameOver
        });
    }
    let to_move = g.to_move();
    if to_move != prof.side {
        return Err(EngineError::NotEnginesTurn(to_move));
    }
    match forced_status(g, prof.side) {
        ForcedStatus::InstantWin(p) | ForcedStatus::ForcedBlock(p) | ForcedStatus::DilemmaWin(p) => return Ok(p),
        ForcedStatus::InstantLoss => {
            // lost against best play; still block one of the threats
            if let Some(&p) = g.completing_cells(prof.side.opponent()).first() {
                return Ok(p);
            }
        }
        ForcedStatus::Free => {
            if let Some(p) = prof
                .table
                .as_ref()
                .and_then(|t| t.lookup(g))
                .filter(|&p| g.cell(p) == Cell::Empty)
            {
                return Ok(p);
            }
        }
    }
    let mut candidates: Vec<Position> = g.empty_cells().collect();
    order_moves(&mut candidates, g.n(), MoveOrdering::CenterOut);
    let first = *candidates.first().ok_or(EngineError::NoEmptyCell)?;
    if prof.fallback_depth == 0 {
        return Ok(first);
    }
    let mut work = g.clone();
    let mut best = (i8::MIN, first);
    for p in candidates {
        work.push(p.index(g.n()), prof.side);
        let score = -lookahead(&mut work, prof.side.opponent(), prof.fallback_depth - 1);
        work.pop();
        if score > best.0 {
            best = (score, p);
            if score == 1 {
                break;
            }
        }
    }
    Ok(best.1)
}

/// Depth-limited negamax over the raw rules with the forced cascade as a
/// shortcut. 1: the mover can force a square, -1: the opponent can, 0:
/// neither within the horizon (or a draw).
fn lookahead(g: &mut Grid, mover: Player, depth: usize) -> i8 {
    let n = g.n();
    match forced_status(g, mover) {
        ForcedStatus::InstantWin(_) | ForcedStatus::DilemmaWin(_) => 1,
        ForcedStatus::InstantLoss => -1,
        ForcedStatus::ForcedBlock(p) => {
            if depth == 0 {
                return 0;
            }
            g.push(p.index(n), mover);
            let v = -lookahead(g, mover.opponent(), depth - 1);
            g.pop();
            v
        }
        ForcedStatus::Free => {
            if depth == 0 || g.is_full() {
                return 0;
            }
            if !g.has_live_square(mover) && !g.has_live_square(mover.opponent()) {
                return 0;
            }
            let mut best = -1;
            for idx in 0..n * n {
                if g.cell_at(idx) != Cell::Empty {
                    continue;
                }
                g.push(idx, mover);
                let v = -lookahead(g, mover.opponent(), depth - 1);
                g.pop();
                if v > best {
                    best = v;
                    if best == 1 {
                        break;
                    }
                }
            }
            best
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameRecord {
    pub n: usize,
    pub moves: Vec<(Position, Player)>,
    pub status: GameStatus,
}

/// Plays two engines against each other until the game ends.
pub fn play_out(a: &EngineProfile, b: &EngineProfile) -> Result<GameRecord, EngineError> {
    if a.n != b.n || a.side == b.side {
        return Err(EngineError::ProfileMismatch);
    }
    let mut g = Grid::new(a.n);
    loop {
        let status = game_status(&g);
        if status != GameStatus::Ongoing {
            return Ok(GameRecord {
                n: a.n,
                moves: g.history().to_vec(),
                status,
            });
        }
        let prof = if g.to_move() == a.side { a } else { b };
        let p = engine_move(&g, prof)?;
        g.place(p, prof.side).expect("engine returned an empty cell");
    }
}
