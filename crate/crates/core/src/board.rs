//! Board state for the square achievement game.
//!
//! A [`Grid`] is an `n × n` array of cells. Every axis-aligned square
//! `(r, c, d)` with vertices `(r,c)`, `(r,c+d)`, `(r+d,c)`, `(r+d,c+d)` is a
//! winning configuration. The grid keeps, for every square, the number of
//! vertices owned by each player so that threat and win queries only touch
//! the squares passing through a changed cell.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::symmetry::{self, Transform};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Cell {
    Empty = 0,
    P1 = 1,
    P2 = 2,
}

impl Cell {
    pub fn digit(self) -> char {
        match self {
            Cell::Empty => '0',
            Cell::P1 => '1',
            Cell::P2 => '2',
        }
    }

    pub fn from_digit(ch: char) -> Option<Cell> {
        match ch {
            '0' => Some(Cell::Empty),
            '1' => Some(Cell::P1),
            '2' => Some(Cell::P2),
            _ => None,
        }
    }

    pub fn player(self) -> Option<Player> {
        match self {
            Cell::Empty => None,
            Cell::P1 => Some(Player::One),
            Cell::P2 => Some(Player::Two),
        }
    }
}

/// One of the two players. Player one moves first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    #[serde(rename = "p1")]
    One,
    #[serde(rename = "p2")]
    Two,
}

impl Player {
    #[inline]
    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    #[inline]
    pub fn cell(self) -> Cell {
        match self {
            Player::One => Cell::P1,
            Player::Two => Cell::P2,
        }
    }

    #[inline]
    fn slot(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Player::One => "p1",
            Player::Two => "p2",
        }
    }

    pub fn parse(s: &str) -> Option<Player> {
        match s.trim().to_ascii_lowercase().as_str() {
            "p1" | "1" => Some(Player::One),
            "p2" | "2" => Some(Player::Two),
            _ => None,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::One => write!(f, "Player 1"),
            Player::Two => write!(f, "Player 2"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Position {
    pub r: usize,
    pub c: usize,
}

impl Position {
    pub const fn new(r: usize, c: usize) -> Self {
        Position { r, c }
    }

    #[inline]
    pub fn index(self, n: usize) -> usize {
        self.r * n + self.c
    }

    #[inline]
    pub fn from_index(idx: usize, n: usize) -> Self {
        Position { r: idx / n, c: idx % n }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.r, self.c)
    }
}

/// An axis-aligned square with top-left vertex `(r, c)` and side `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SquareSpec {
    pub r: usize,
    pub c: usize,
    pub d: usize,
}

impl SquareSpec {
    pub fn vertices(self) -> [Position; 4] {
        let SquareSpec { r, c, d } = self;
        [
            Position::new(r, c),
            Position::new(r, c + d),
            Position::new(r + d, c),
            Position::new(r + d, c + d),
        ]
    }

    pub fn fits(self, n: usize) -> bool {
        self.d >= 1 && self.r + self.d < n && self.c + self.d < n
    }
}

/// Every square on an `n × n` board, row-major by top-left vertex, then by
/// ascending size.
pub fn enumerate_squares(n: usize) -> Vec<SquareSpec> {
    let mut out = Vec::new();
    for r in 0..n {
        for c in 0..n {
            for d in 1..n {
                let sq = SquareSpec { r, c, d };
                if sq.fits(n) {
                    out.push(sq);
                }
            }
        }
    }
    out
}

/// Square list and cell/square incidence for one board size.
#[derive(Debug)]
pub struct Geometry {
    n: usize,
    squares: Vec<SquareSpec>,
    square_cells: Vec<[usize; 4]>,
    cell_squares: Vec<Vec<usize>>,
    source_maps: [Vec<usize>; 8],
}

impl Geometry {
    fn build(n: usize) -> Geometry {
        let squares = enumerate_squares(n);
        let square_cells: Vec<[usize; 4]> = squares
            .iter()
            .map(|sq| sq.vertices().map(|p| p.index(n)))
            .collect();
        let mut cell_squares = vec![Vec::new(); n * n];
        for (si, cells) in square_cells.iter().enumerate() {
            for &cell in cells {
                cell_squares[cell].push(si);
            }
        }
        Geometry {
            n,
            squares,
            square_cells,
            cell_squares,
            source_maps: symmetry::source_maps(n),
        }
    }

    /// Shared geometry for board size `n`, built once per process.
    pub fn shared(n: usize) -> Arc<Geometry> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Geometry>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(Geometry::build(n)))
            .clone()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn squares(&self) -> &[SquareSpec] {
        &self.squares
    }

    pub fn square_cells(&self, si: usize) -> &[usize; 4] {
        &self.square_cells[si]
    }

    pub fn squares_through(&self, cell: usize) -> &[usize] {
        &self.cell_squares[cell]
    }

    pub(crate) fn source_maps(&self) -> &[Vec<usize>; 8] {
        &self.source_maps
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoardError {
    #[error("position {0} is outside the {1}x{1} board")]
    OutOfRange(Position, usize),
    #[error("cell {0} is already occupied")]
    Occupied(Position),
    #[error("no move to undo")]
    EmptyHistory,
    #[error("invalid state string: {0}")]
    BadEncoding(String),
}

/// The game board with incremental per-square occupancy counts.
#[derive(Clone)]
pub struct Grid {
    geom: Arc<Geometry>,
    cells: Vec<Cell>,
    /// `counts[square][player]`
    counts: Vec<[u8; 2]>,
    history: Vec<(Position, Player)>,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n() == other.n()
            && self.cells == other.cells
            && self.counts == other.counts
            && self.history == other.history
    }
}

impl Eq for Grid {}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n())
            .field("state", &self.encode())
            .field("history", &self.history)
            .finish()
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n();
        write!(f, "   ")?;
        for c in 0..n {
            write!(f, " {c}")?;
        }
        writeln!(f)?;
        for r in 0..n {
            write!(f, "{r:>2} ")?;
            for c in 0..n {
                let ch = match self.cells[r * n + c] {
                    Cell::Empty => '.',
                    Cell::P1 => 'O',
                    Cell::P2 => 'X',
                };
                write!(f, " {ch}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl Grid {
    pub fn new(n: usize) -> Grid {
        let geom = Geometry::shared(n);
        let squares = geom.squares.len();
        Grid {
            geom,
            cells: vec![Cell::Empty; n * n],
            counts: vec![[0, 0]; squares],
            history: Vec::new(),
        }
    }

    /// Builds a grid from an arbitrary cell assignment. The move history is
    /// left empty; alternation legality is not checked.
    pub fn from_cells(n: usize, cells: &[Cell]) -> Grid {
        assert_eq!(cells.len(), n * n, "cell array does not match n");
        let mut g = Grid::new(n);
        for (idx, &cell) in cells.iter().enumerate() {
            if let Some(p) = cell.player() {
                g.set_cell(idx, p);
            }
        }
        g
    }

    /// Parses the row-major `'0'/'1'/'2'` state string.
    pub fn decode(n: usize, s: &str) -> Result<Grid, BoardError> {
        if s.chars().count() != n * n {
            return Err(BoardError::BadEncoding(format!(
                "expected {} characters, got {}",
                n * n,
                s.chars().count()
            )));
        }
        let cells = s
            .chars()
            .map(|ch| Cell::from_digit(ch).ok_or_else(|| BoardError::BadEncoding(format!("bad cell {ch:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Grid::from_cells(n, &cells))
    }

    /// Convenience for tests and fixtures: place the given stones without
    /// recording history.
    pub fn with_stones(n: usize, p1: &[(usize, usize)], p2: &[(usize, usize)]) -> Grid {
        let mut g = Grid::new(n);
        for &(r, c) in p1 {
            g.set_cell(r * n + c, Player::One);
        }
        for &(r, c) in p2 {
            g.set_cell(r * n + c, Player::Two);
        }
        g
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.geom.n
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geom
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    #[inline]
    pub fn cell(&self, p: Position) -> Cell {
        self.cells[p.index(self.n())]
    }

    #[inline]
    pub fn cell_at(&self, idx: usize) -> Cell {
        self.cells[idx]
    }

    pub fn history(&self) -> &[(Position, Player)] {
        &self.history
    }

    pub fn stones(&self) -> usize {
        self.cells.iter().filter(|&&c| c != Cell::Empty).count()
    }

    pub fn is_full(&self) -> bool {
        self.cells.iter().all(|&c| c != Cell::Empty)
    }

    /// The player to move assuming alternating play from an empty board.
    pub fn to_move(&self) -> Player {
        if self.stones().is_multiple_of(2) {
            Player::One
        } else {
            Player::Two
        }
    }

    /// Count of `player`'s stones on square `si`.
    #[inline]
    pub fn count(&self, si: usize, player: Player) -> u8 {
        self.counts[si][player.slot()]
    }

    pub fn empty_cells(&self) -> impl Iterator<Item = Position> + '_ {
        let n = self.n();
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == Cell::Empty)
            .map(move |(i, _)| Position::from_index(i, n))
    }

    fn set_cell(&mut self, idx: usize, player: Player) {
        debug_assert_eq!(self.cells[idx], Cell::Empty);
        self.cells[idx] = player.cell();
        let slot = player.slot();
        for &si in &self.geom.cell_squares[idx] {
            self.counts[si][slot] += 1;
        }
    }

    fn clear_cell(&mut self, idx: usize) {
        let player = self.cells[idx]
            .player()
            .expect("clearing an empty cell");
        self.cells[idx] = Cell::Empty;
        let slot = player.slot();
        for &si in &self.geom.cell_squares[idx] {
            self.counts[si][slot] -= 1;
        }
    }

    pub fn place(&mut self, p: Position, player: Player) -> Result<(), BoardError> {
        let n = self.n();
        if p.r >= n || p.c >= n {
            return Err(BoardError::OutOfRange(p, n));
        }
        let idx = p.index(n);
        if self.cells[idx] != Cell::Empty {
            return Err(BoardError::Occupied(p));
        }
        self.set_cell(idx, player);
        self.history.push((p, player));
        Ok(())
    }

    /// Unchecked placement for the search loops. The cell must be empty.
    #[inline]
    pub(crate) fn push(&mut self, idx: usize, player: Player) {
        self.set_cell(idx, player);
        self.history.push((Position::from_index(idx, self.n()), player));
    }

    #[inline]
    pub(crate) fn pop(&mut self) {
        let (p, _) = self.history.pop().expect("pop on empty history");
        self.clear_cell(p.index(self.n()));
    }

    pub fn undo_last(&mut self) -> Result<(Position, Player), BoardError> {
        let (p, player) = *self.history.last().ok_or(BoardError::EmptyHistory)?;
        self.pop();
        Ok((p, player))
    }

    /// The first square (in enumeration order) whose four vertices all
    /// belong to `player`.
    pub fn completed_square(&self, player: Player) -> Option<SquareSpec> {
        let slot = player.slot();
        self.counts
            .iter()
            .position(|c| c[slot] == 4)
            .map(|si| self.geom.squares[si])
    }

    fn lone_empty_vertex(&self, si: usize) -> usize {
        *self.geom.square_cells[si]
            .iter()
            .find(|&&cell| self.cells[cell] == Cell::Empty)
            .expect("square with three stones of one player and no opponent has an empty vertex")
    }

    /// Empty cells where a stone of `player` would complete a square, as
    /// ascending cell indices.
    pub(crate) fn completing_indices(&self, player: Player) -> Vec<usize> {
        let slot = player.slot();
        let other = player.opponent().slot();
        let mut out: Vec<usize> = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, c)| c[slot] == 3 && c[other] == 0)
            .map(|(si, _)| self.lone_empty_vertex(si))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Distinct completing cells for `player`, saturating at two, together
    /// with the lowest such cell index.
    pub(crate) fn threat_summary(&self, player: Player) -> (usize, Option<usize>) {
        let slot = player.slot();
        let other = player.opponent().slot();
        let mut seen = [usize::MAX; 2];
        let mut count = 0;
        let mut first: Option<usize> = None;
        for (si, c) in self.counts.iter().enumerate() {
            if c[slot] == 3 && c[other] == 0 {
                let cell = self.lone_empty_vertex(si);
                first = Some(first.map_or(cell, |f| f.min(cell)));
                if count < 2 && !seen[..count].contains(&cell) {
                    seen[count] = cell;
                    count += 1;
                }
            }
        }
        (count, first)
    }

    /// Empty cells where `player` would complete a square.
    pub fn completing_cells(&self, player: Player) -> Vec<Position> {
        let n = self.n();
        self.completing_indices(player)
            .into_iter()
            .map(|i| Position::from_index(i, n))
            .collect()
    }

    /// Whether some square holds no stone of `player`'s opponent.
    pub fn has_live_square(&self, player: Player) -> bool {
        let other = player.opponent().slot();
        self.counts.iter().any(|c| c[other] == 0)
    }

    /// Whether the empty cell `idx` lies on a square free of `player`'s
    /// opponent.
    pub(crate) fn on_live_square(&self, idx: usize, player: Player) -> bool {
        let other = player.opponent().slot();
        self.geom
            .squares_through(idx)
            .iter()
            .any(|&si| self.counts[si][other] == 0)
    }

    pub fn is_column_symmetric(&self) -> bool {
        let n = self.n();
        (0..n).all(|r| (0..n / 2).all(|c| self.cells[r * n + c] == self.cells[r * n + n - 1 - c]))
    }

    /// Row-major `'0'/'1'/'2'` encoding.
    pub fn encode(&self) -> String {
        self.cells.iter().map(|c| c.digit()).collect()
    }

    /// Applies a dihedral transform to the cell contents. History positions
    /// are mapped as well.
    pub fn transform(&self, t: Transform) -> Grid {
        let n = self.n();
        let mut g = Grid::new(n);
        for (idx, &cell) in self.cells.iter().enumerate() {
            if let Some(p) = cell.player() {
                let q = t.apply(Position::from_index(idx, n), n);
                g.set_cell(q.index(n), p);
            }
        }
        g.history = self
            .history
            .iter()
            .map(|&(p, v)| (t.apply(p, n), v))
            .collect();
        g
    }

    /// Recomputes every square count from the cell array. Used to check the
    /// incremental bookkeeping.
    pub fn recount(&self) -> Vec<[u8; 2]> {
        self.geom
            .square_cells
            .iter()
            .map(|cells| {
                let mut c = [0u8; 2];
                for &cell in cells {
                    if let Some(p) = self.cells[cell].player() {
                        c[p.slot()] += 1;
                    }
                }
                c
            })
            .collect()
    }

    pub fn counts(&self) -> &[[u8; 2]] {
        &self.counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_squares(n: usize) -> usize {
        let mut count = 0;
        for r in 0..n {
            for c in 0..n {
                for d in 0..=n {
                    if d >= 1 && r + d < n && c + d < n {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn square_counts() {
        assert_eq!(enumerate_squares(2), vec![SquareSpec { r: 0, c: 0, d: 1 }]);
        assert_eq!(enumerate_squares(3).len(), 5);
        assert_eq!(enumerate_squares(5).len(), 30);
        for n in 1..=8 {
            let formula: usize = (1..n).map(|d| (n - d) * (n - d)).sum();
            assert_eq!(enumerate_squares(n).len(), formula);
            assert_eq!(brute_force_squares(n), formula);
        }
    }

    #[test]
    fn enumeration_order() {
        let sq = enumerate_squares(3);
        assert_eq!(
            sq,
            vec![
                SquareSpec { r: 0, c: 0, d: 1 },
                SquareSpec { r: 0, c: 0, d: 2 },
                SquareSpec { r: 0, c: 1, d: 1 },
                SquareSpec { r: 1, c: 0, d: 1 },
                SquareSpec { r: 1, c: 1, d: 1 },
            ]
        );
    }

    #[test]
    fn place_updates_counts() {
        let mut g = Grid::new(3);
        g.place(Position::new(0, 0), Player::One).unwrap();
        let si = g.geometry().squares().iter().position(|s| *s == SquareSpec { r: 0, c: 0, d: 1 }).unwrap();
        assert_eq!(g.count(si, Player::One), 1);
        assert_eq!(g.count(si, Player::Two), 0);
    }

    #[test]
    fn place_errors() {
        let mut g = Grid::new(3);
        g.place(Position::new(1, 1), Player::One).unwrap();
        assert_eq!(
            g.place(Position::new(1, 1), Player::Two),
            Err(BoardError::Occupied(Position::new(1, 1)))
        );
        assert!(matches!(
            g.place(Position::new(3, 0), Player::Two),
            Err(BoardError::OutOfRange(..))
        ));
        let mut empty = Grid::new(3);
        assert_eq!(empty.undo_last(), Err(BoardError::EmptyHistory));
    }

    #[test]
    fn undo_restores_state() {
        let mut g = Grid::new(4);
        g.place(Position::new(0, 1), Player::One).unwrap();
        let before = g.clone();
        g.place(Position::new(2, 3), Player::Two).unwrap();
        assert_eq!(g.undo_last().unwrap(), (Position::new(2, 3), Player::Two));
        assert_eq!(g, before);
    }

    #[test]
    fn completed_square_examples() {
        let g = Grid::with_stones(3, &[(0, 0), (0, 1), (1, 0), (1, 1)], &[]);
        assert_eq!(g.completed_square(Player::One), Some(SquareSpec { r: 0, c: 0, d: 1 }));
        assert_eq!(g.completed_square(Player::Two), None);
        assert_eq!(Grid::new(3).completed_square(Player::One), None);
        let g = Grid::with_stones(3, &[(0, 0), (0, 2), (2, 0), (2, 2)], &[]);
        assert_eq!(g.completed_square(Player::One), Some(SquareSpec { r: 0, c: 0, d: 2 }));
    }

    #[test]
    fn completing_cells_examples() {
        let g = Grid::with_stones(3, &[(0, 0), (0, 1), (1, 0)], &[]);
        assert_eq!(g.completing_cells(Player::One), vec![Position::new(1, 1)]);
        let g = Grid::with_stones(3, &[(0, 0), (0, 1), (1, 0), (0, 2), (2, 0)], &[]);
        assert_eq!(
            g.completing_cells(Player::One),
            vec![Position::new(1, 1), Position::new(2, 2)]
        );
        assert!(Grid::new(3).completing_cells(Player::One).is_empty());
        // a blocked square is not a threat
        let g = Grid::with_stones(3, &[(0, 0), (0, 1), (1, 0)], &[(1, 1)]);
        assert!(g.completing_cells(Player::One).is_empty());
    }

    #[test]
    fn live_square_examples() {
        let g = Grid::new(3);
        assert!(g.has_live_square(Player::One));
        assert!(g.has_live_square(Player::Two));
        // the middle row and column leave the corner square (0,0,2) open
        let g = Grid::with_stones(3, &[], &[(1, 0), (1, 1), (1, 2), (0, 1), (2, 1)]);
        assert!(g.has_live_square(Player::One));
        let g = Grid::with_stones(3, &[], &[(1, 0), (1, 1), (1, 2), (0, 1), (2, 1), (2, 2)]);
        assert!(!g.has_live_square(Player::One));
        assert!(g.has_live_square(Player::Two));
        let g = Grid::with_stones(3, &[(0, 0)], &[]);
        assert!(g.has_live_square(Player::Two));
    }

    #[test]
    fn column_symmetry() {
        for n in 3..=6 {
            assert!(Grid::new(n).is_column_symmetric());
        }
        assert!(Grid::with_stones(5, &[(2, 2)], &[]).is_column_symmetric());
        assert!(!Grid::with_stones(5, &[(0, 0)], &[]).is_column_symmetric());
        assert!(Grid::with_stones(4, &[(0, 0), (0, 3)], &[]).is_column_symmetric());
    }

    #[test]
    fn encode_decode() {
        assert_eq!(Grid::new(3).encode(), "000000000");
        let g = Grid::with_stones(3, &[(0, 0)], &[(2, 1)]);
        assert_eq!(g.encode(), "100000020");
        assert_eq!(Grid::decode(3, "100000020").unwrap().cells(), g.cells());
        assert!(Grid::decode(3, "1000").is_err());
        assert!(Grid::decode(3, "10000002x").is_err());
    }
}
