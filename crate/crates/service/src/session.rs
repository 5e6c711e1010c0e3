//! One live game between a human and the engine.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sqgame::engine::{engine_move, EngineError, EngineProfile};
use sqgame::solver::{StrategyError, StrategyTable};
use sqgame::{game_status, strategies, BoardError, GameStatus, Grid, Player, Position, SquareSpec};
use thiserror::Error;
use uuid::Uuid;

pub const SUPPORTED_SIZES: [usize; 3] = [3, 4, 5];

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("unsupported board size {0}; supported sizes are 3, 4 and 5")]
    UnsupportedSize(usize),
    #[error("it is not your turn")]
    NotYourTurn,
    #[error("the game is over")]
    GameOver,
    #[error("cell ({r},{c}) is outside the {n}x{n} board")]
    OutOfRange { r: usize, c: usize, n: usize },
    #[error("cell ({r},{c}) is occupied")]
    Occupied { r: usize, c: usize },
    #[error("move log does not replay: {0}")]
    BadLog(String),
    #[error("engine failure: {0}")]
    Engine(#[from] EngineError),
}

/// Strategy tables for every engine seat, loaded once and shared.
#[derive(Clone, Default)]
pub struct Tables {
    tables: HashMap<(usize, Player), Arc<StrategyTable>>,
}

impl Tables {
    /// Loads the proven tables, preferring files in `dir` over the bundled ones.
    pub fn load(dir: Option<&Path>) -> Result<Tables, StrategyError> {
        let mut tables = HashMap::new();
        for n in SUPPORTED_SIZES {
            if let Some(side) = strategies::guaranteed_side(n) {
                if let Some(t) = strategies::load(n, side, dir)? {
                    tables.insert((n, side), Arc::new(t));
                }
            }
        }
        Ok(Tables { tables })
    }

    /// No tables: the engine falls back to look-ahead everywhere.
    pub fn empty() -> Tables {
        Tables::default()
    }

    pub fn profile(&self, n: usize, side: Player) -> EngineProfile {
        let prof = EngineProfile::new(n, side);
        match self.tables.get(&(n, side)) {
            Some(t) => prof.with_table(t.clone()).expect("table keyed by its own size and side"),
            None => prof,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub r: usize,
    pub c: usize,
    pub player: Player,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatusLabel {
    Ongoing,
    Won,
    Draw,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WinningSquare {
    pub r: usize,
    pub c: usize,
    pub d: usize,
    pub vertices: Vec<Position>,
}

impl From<SquareSpec> for WinningSquare {
    fn from(sq: SquareSpec) -> Self {
        WinningSquare {
            r: sq.r,
            c: sq.c,
            d: sq.d,
            vertices: sq.vertices().to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Threats {
    pub p1: Vec<Position>,
    pub p2: Vec<Position>,
}

/// What clients see of a session.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSnapshot {
    pub id: String,
    pub n: usize,
    pub human_side: Player,
    pub engine_side: Player,
    /// Row-major cells, `0` empty, `1` player one, `2` player two.
    pub state: String,
    /// `None` once the game is over.
    pub to_move: Option<Player>,
    pub status: StatusLabel,
    pub winner: Option<Player>,
    pub winning_square: Option<WinningSquare>,
    pub threats: Threats,
    /// Whether the engine plays a side with a verified strategy table.
    pub guarantee: bool,
    pub moves: Vec<MoveRecord>,
    /// The engine's reply to the request that produced this snapshot.
    pub engine_move: Option<Position>,
}

/// The persistent part of a session: enough to rebuild it by replay.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub id: Uuid,
    pub n: usize,
    pub human_side: Player,
    pub moves: Vec<MoveRecord>,
}

pub struct Session {
    pub id: Uuid,
    pub human_side: Player,
    grid: Grid,
    engine: EngineProfile,
}

impl Session {
    /// Starts a game; when the engine moves first its opening is played and
    /// returned.
    pub fn create(id: Uuid, n: usize, human_side: Player, tables: &Tables) -> Result<(Session, Option<Position>), SessionError> {
        if !SUPPORTED_SIZES.contains(&n) {
            return Err(SessionError::UnsupportedSize(n));
        }
        let mut s = Session {
            id,
            human_side,
            grid: Grid::new(n),
            engine: tables.profile(n, human_side.opponent()),
        };
        let reply = s.engine_reply()?;
        Ok((s, reply))
    }

    /// [`Session::create`] with a fresh id.
    pub fn start(n: usize, human_side: Player, tables: &Tables) -> Result<(Session, Option<Position>), SessionError> {
        Session::create(Uuid::new_v4(), n, human_side, tables)
    }

    /// Rebuilds a session from its record, checking every move.
    pub fn replay(rec: &SessionRecord, tables: &Tables) -> Result<Session, SessionError> {
        if !SUPPORTED_SIZES.contains(&rec.n) {
            return Err(SessionError::UnsupportedSize(rec.n));
        }
        let mut s = Session {
            id: rec.id,
            human_side: rec.human_side,
            grid: Grid::new(rec.n),
            engine: tables.profile(rec.n, rec.human_side.opponent()),
        };
        for m in &rec.moves {
            if m.player != s.grid.to_move() || game_status(&s.grid) != GameStatus::Ongoing {
                return Err(SessionError::BadLog(format!("move ({},{}) out of turn", m.r, m.c)));
            }
            s.grid
                .place(Position::new(m.r, m.c), m.player)
                .map_err(|e| SessionError::BadLog(e.to_string()))?;
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn engine_side(&self) -> Player {
        self.engine.side
    }

    pub fn guarantee(&self) -> bool {
        self.engine.table.is_some() && strategies::guaranteed_side(self.n()) == Some(self.engine.side)
    }

    /// Applies the human's move and, if the game goes on, the engine's reply.
    pub fn submit(&mut self, r: usize, c: usize) -> Result<Option<Position>, SessionError> {
        if game_status(&self.grid) != GameStatus::Ongoing {
            return Err(SessionError::GameOver);
        }
        if self.grid.to_move() != self.human_side {
            return Err(SessionError::NotYourTurn);
        }
        let n = self.n();
        self.grid.place(Position::new(r, c), self.human_side).map_err(|e| match e {
            BoardError::Occupied(_) => SessionError::Occupied { r, c },
            _ => SessionError::OutOfRange { r, c, n },
        })?;
        self.engine_reply()
    }

    fn engine_reply(&mut self) -> Result<Option<Position>, SessionError> {
        if game_status(&self.grid) != GameStatus::Ongoing || self.grid.to_move() != self.engine.side {
            return Ok(None);
        }
        let p = engine_move(&self.grid, &self.engine)?;
        self.grid
            .place(p, self.engine.side)
            .expect("engine plays an empty cell in turn");
        Ok(Some(p))
    }

    pub fn moves(&self) -> Vec<MoveRecord> {
        self.grid
            .history()
            .iter()
            .map(|&(p, player)| MoveRecord { r: p.r, c: p.c, player })
            .collect()
    }

    pub fn record(&self) -> SessionRecord {
        SessionRecord {
            id: self.id,
            n: self.n(),
            human_side: self.human_side,
            moves: self.moves(),
        }
    }

    pub fn snapshot(&self, engine_move: Option<Position>) -> GameSnapshot {
        let status = game_status(&self.grid);
        let (label, winner, square) = match status {
            GameStatus::Ongoing => (StatusLabel::Ongoing, None, None),
            GameStatus::WonBy(p, sq) => (StatusLabel::Won, Some(p), Some(sq.into())),
            GameStatus::Draw => (StatusLabel::Draw, None, None),
        };
        GameSnapshot {
            id: self.id.to_string(),
            n: self.n(),
            human_side: self.human_side,
            engine_side: self.engine.side,
            state: self.grid.encode(),
            to_move: (label == StatusLabel::Ongoing).then(|| self.grid.to_move()),
            status: label,
            winner,
            winning_square: square,
            threats: Threats {
                p1: self.grid.completing_cells(Player::One),
                p2: self.grid.completing_cells(Player::Two),
            },
            guarantee: self.guarantee(),
            moves: self.moves(),
            engine_move,
        }
    }
}
