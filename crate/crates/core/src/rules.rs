//! Optimal-play move discipline.
//!
//! Before any free choice, a player to move runs the forced-move cascade:
//! win if a square can be completed, lose if the opponent already has two
//! completing cells, block a single opponent completing cell, or win by
//! creating two completing cells at once. Only when none of these applies
//! does the player pick from the candidate list, which is further narrowed
//! by the symmetry rules and the optional useful-vertex restriction.
//!
//! There is deliberately no rule that forces a player to occupy a cell just
//! because the opponent could use it to build a double threat next move.
//! Answering with a counter-threat can be strictly better.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::board::{Grid, Player, Position, SquareSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForcedStatus {
    /// The mover completes a square on this cell.
    InstantWin(Position),
    /// The opponent has two or more completing cells.
    InstantLoss,
    /// The opponent has exactly one completing cell; the mover must take it.
    ForcedBlock(Position),
    /// Playing here leaves the mover with two or more completing cells.
    DilemmaWin(Position),
    Free,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoveOrdering {
    #[default]
    #[serde(rename = "row-major")]
    RowMajor,
    /// Nearest to the board centre first, ties row-major.
    #[serde(rename = "center-out")]
    CenterOut,
}

impl fmt::Display for MoveOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoveOrdering::RowMajor => f.write_str("row-major"),
            MoveOrdering::CenterOut => f.write_str("center-out"),
        }
    }
}

impl FromStr for MoveOrdering {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "row-major" => Ok(MoveOrdering::RowMajor),
            "center-out" => Ok(MoveOrdering::CenterOut),
            other => Err(format!("unknown move ordering {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleConfig {
    /// While the board equals its left-right mirror, only columns
    /// `0..=(n-1)/2` may be played.
    pub use_symmetry_restriction: bool,
    /// The first move (and the second, after an odd-board centre opening)
    /// must satisfy `r <= c`.
    pub use_diagonal_first_move_restriction: bool,
    /// `(n, player)` pairs for which free moves must lie on a square that
    /// player two has not touched, when such a cell exists.
    pub useful_vertex_restriction_for: BTreeSet<(usize, Player)>,
    pub move_ordering: MoveOrdering,
}

impl Default for RuleConfig {
    fn default() -> Self {
        RuleConfig {
            use_symmetry_restriction: true,
            use_diagonal_first_move_restriction: true,
            useful_vertex_restriction_for: [(4, Player::Two), (5, Player::One)].into_iter().collect(),
            move_ordering: MoveOrdering::RowMajor,
        }
    }
}

impl RuleConfig {
    /// No restrictions at all: every empty cell is a candidate.
    pub fn unrestricted() -> Self {
        RuleConfig {
            use_symmetry_restriction: false,
            use_diagonal_first_move_restriction: false,
            useful_vertex_restriction_for: BTreeSet::new(),
            move_ordering: MoveOrdering::RowMajor,
        }
    }

    pub fn useful_vertex_applies(&self, n: usize, mover: Player) -> bool {
        self.useful_vertex_restriction_for.contains(&(n, mover))
    }
}

impl fmt::Display for RuleConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let on = |b: bool| if b { "on" } else { "off" };
        let useful: Vec<String> = self
            .useful_vertex_restriction_for
            .iter()
            .map(|(n, p)| format!("{n}:{}", p.label()))
            .collect();
        write!(
            f,
            "symmetry={} diagonal={} useful={} ordering={}",
            on(self.use_symmetry_restriction),
            on(self.use_diagonal_first_move_restriction),
            if useful.is_empty() { "none".to_string() } else { useful.join(",") },
            self.move_ordering
        )
    }
}

impl FromStr for RuleConfig {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut cfg = RuleConfig::unrestricted();
        let flag = |v: &str| match v {
            "on" => Ok(true),
            "off" => Ok(false),
            _ => Err(format!("expected on/off, got {v:?}")),
        };
        for part in s.split_whitespace() {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("malformed rule setting {part:?}"))?;
            match key {
                "symmetry" => cfg.use_symmetry_restriction = flag(value)?,
                "diagonal" => cfg.use_diagonal_first_move_restriction = flag(value)?,
                "useful" => {
                    if value != "none" {
                        for item in value.split(',') {
                            let (n, p) = item
                                .split_once(':')
                                .ok_or_else(|| format!("malformed useful entry {item:?}"))?;
                            let n: usize = n.parse().map_err(|_| format!("bad size in {item:?}"))?;
                            let p = Player::parse(p).ok_or_else(|| format!("bad player in {item:?}"))?;
                            cfg.useful_vertex_restriction_for.insert((n, p));
                        }
                    }
                }
                "ordering" => cfg.move_ordering = value.parse()?,
                other => return Err(format!("unknown rule setting {other:?}")),
            }
        }
        Ok(cfg)
    }
}

/// Runs the forced-move cascade for `mover`.
pub fn forced_status(g: &Grid, mover: Player) -> ForcedStatus {
    let n = g.n();
    let (own, own_first) = g.threat_summary(mover);
    if own > 0 {
        return ForcedStatus::InstantWin(Position::from_index(own_first.unwrap(), n));
    }
    let (theirs, their_first) = g.threat_summary(mover.opponent());
    if theirs >= 2 {
        return ForcedStatus::InstantLoss;
    }
    if theirs == 1 {
        return ForcedStatus::ForcedBlock(Position::from_index(their_first.unwrap(), n));
    }
    match first_dilemma_cell(g, mover) {
        Some(idx) => ForcedStatus::DilemmaWin(Position::from_index(idx, n)),
        None => ForcedStatus::Free,
    }
}

/// First empty cell (row-major) where a stone of `mover` creates two
/// distinct completing cells. Assumes `mover` has no completing cell yet.
pub(crate) fn first_dilemma_cell(g: &Grid, mover: Player) -> Option<usize> {
    let geom = g.geometry();
    let opp = mover.opponent();
    (0..g.cells().len()).find(|&idx| {
        if g.cell_at(idx) != crate::board::Cell::Empty {
            return false;
        }
        let mut first_threat = usize::MAX;
        for &si in geom.squares_through(idx) {
            if g.count(si, mover) == 2 && g.count(si, opp) == 0 {
                let other = geom
                    .square_cells(si)
                    .iter()
                    .copied()
                    .find(|&c| c != idx && g.cell_at(c) == crate::board::Cell::Empty)
                    .expect("two own stones, no opponent: two empty vertices");
                if first_threat == usize::MAX {
                    first_threat = other;
                } else if other != first_threat {
                    return true;
                }
            }
        }
        false
    })
}

fn diagonal_restriction_active(g: &Grid) -> bool {
    let n = g.n();
    match g.stones() {
        0 => true,
        1 => n % 2 == 1 && g.cell(Position::new(n / 2, n / 2)) != crate::board::Cell::Empty,
        _ => false,
    }
}

/// Candidate cells for a free move, filtered and ordered by `cfg`.
pub fn legal_candidates(g: &Grid, mover: Player, cfg: &RuleConfig) -> Vec<Position> {
    let n = g.n();
    let mut cells: Vec<Position> = g.empty_cells().collect();
    if cfg.use_symmetry_restriction && g.is_column_symmetric() {
        let half = (n - 1) / 2;
        cells.retain(|p| p.c <= half);
    }
    if cfg.use_diagonal_first_move_restriction && diagonal_restriction_active(g) {
        cells.retain(|p| p.r <= p.c);
    }
    if cfg.useful_vertex_applies(n, mover) {
        let useful: Vec<Position> = cells
            .iter()
            .copied()
            .filter(|p| g.on_live_square(p.index(n), Player::One))
            .collect();
        if !useful.is_empty() {
            cells = useful;
        }
    }
    order_moves(&mut cells, n, cfg.move_ordering);
    cells
}

pub(crate) fn order_moves(cells: &mut [Position], n: usize, ordering: MoveOrdering) {
    match ordering {
        MoveOrdering::RowMajor => cells.sort_by_key(|p| p.index(n)),
        MoveOrdering::CenterOut => {
            // doubled coordinates keep the centre integral for even n
            let centre = n as isize - 1;
            cells.sort_by_key(|p| {
                let dr = 2 * p.r as isize - centre;
                let dc = 2 * p.c as isize - centre;
                (dr * dr + dc * dc, p.index(n))
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GameStatus {
    Ongoing,
    WonBy(Player, SquareSpec),
    Draw,
}

pub fn game_status(g: &Grid) -> GameStatus {
    for player in [Player::One, Player::Two] {
        if let Some(sq) = g.completed_square(player) {
            return GameStatus::WonBy(player, sq);
        }
    }
    if g.is_full() || (!g.has_live_square(Player::One) && !g.has_live_square(Player::Two)) {
        GameStatus::Draw
    } else {
        GameStatus::Ongoing
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pos(list: &[(usize, usize)]) -> Vec<Position> {
        list.iter().map(|&(r, c)| Position::new(r, c)).collect()
    }

    #[test]
    fn forced_status_examples() {
        assert_eq!(forced_status(&Grid::new(3), Player::One), ForcedStatus::Free);
        assert_eq!(forced_status(&Grid::new(5), Player::Two), ForcedStatus::Free);

        let g = Grid::with_stones(3, &[], &[(0, 0), (0, 1), (1, 0)]);
        assert_eq!(forced_status(&g, Player::One), ForcedStatus::ForcedBlock(Position::new(1, 1)));

        let g = Grid::with_stones(3, &[(0, 0), (1, 1), (2, 0)], &[(1, 2), (2, 2)]);
        assert_eq!(forced_status(&g, Player::One), ForcedStatus::DilemmaWin(Position::new(1, 0)));

        let g = Grid::with_stones(3, &[], &[(0, 0), (0, 1), (1, 0), (0, 2), (2, 0)]);
        assert_eq!(forced_status(&g, Player::One), ForcedStatus::InstantLoss);
    }

    #[test]
    fn instant_win_beats_opponent_threats() {
        let g = Grid::with_stones(
            4,
            &[(0, 0), (0, 1), (1, 0)],
            &[(2, 2), (2, 3), (3, 2), (0, 3), (3, 0)],
        );
        assert_eq!(forced_status(&g, Player::One), ForcedStatus::InstantWin(Position::new(1, 1)));
        assert_eq!(forced_status(&g, Player::Two), ForcedStatus::InstantWin(Position::new(3, 3)));
    }

    #[test]
    fn candidates_examples() {
        let cfg = RuleConfig::default();
        assert_eq!(
            legal_candidates(&Grid::new(3), Player::One, &cfg),
            pos(&[(0, 0), (0, 1), (1, 1)])
        );
        let mut g = Grid::new(5);
        g.place(Position::new(2, 2), Player::One).unwrap();
        assert_eq!(
            legal_candidates(&g, Player::Two, &cfg),
            pos(&[(0, 0), (0, 1), (0, 2), (1, 1), (1, 2)])
        );
        assert_eq!(
            legal_candidates(&Grid::new(4), Player::One, &cfg),
            pos(&[(0, 0), (0, 1), (1, 1)])
        );
    }

    #[test]
    fn unrestricted_candidates_are_empty_cells() {
        let g = Grid::with_stones(4, &[(0, 0), (3, 1)], &[(2, 2)]);
        let all: Vec<Position> = g.empty_cells().collect();
        assert_eq!(legal_candidates(&g, Player::Two, &RuleConfig::unrestricted()), all);
    }

    #[test]
    fn useful_vertex_filter() {
        let cfg = RuleConfig::default();
        // P2 stones on (1,1) kill every square through the corner (0,0) on 4x4
        // except the ones avoiding (1,1); check that filtered cells are live
        let g = Grid::with_stones(4, &[(0, 0), (3, 3)], &[(1, 1), (2, 2)]);
        let cands = legal_candidates(&g, Player::Two, &cfg);
        assert!(!cands.is_empty());
        for p in &cands {
            assert!(g.on_live_square(p.index(4), Player::One));
        }
        let dead: Vec<Position> = g
            .empty_cells()
            .filter(|p| !g.on_live_square(p.index(4), Player::One))
            .collect();
        assert!(dead.iter().all(|p| !cands.contains(p)));
    }

    #[test]
    fn useful_vertex_inactive_without_live_squares() {
        let cfg = RuleConfig::default();
        // rows 1 and 2 meet every square except the full-board one
        let g = Grid::with_stones(
            4,
            &[(0, 1), (0, 2), (3, 0), (3, 1), (3, 2)],
            &[(1, 0), (1, 1), (1, 2), (1, 3), (2, 0), (2, 1), (2, 2), (2, 3), (0, 0)],
        );
        assert!(!g.has_live_square(Player::One));
        let mut relaxed = cfg.clone();
        relaxed.useful_vertex_restriction_for.clear();
        assert_eq!(
            legal_candidates(&g, Player::Two, &cfg),
            legal_candidates(&g, Player::Two, &relaxed)
        );
    }

    #[test]
    fn center_out_ordering() {
        let mut cells: Vec<Position> = Grid::new(5).empty_cells().collect();
        order_moves(&mut cells, 5, MoveOrdering::CenterOut);
        assert_eq!(cells[0], Position::new(2, 2));
        assert_eq!(&cells[1..5], &pos(&[(1, 2), (2, 1), (2, 3), (3, 2)])[..]);
    }

    #[test]
    fn game_status_examples() {
        assert_eq!(game_status(&Grid::new(3)), GameStatus::Ongoing);
        let g = Grid::with_stones(3, &[(0, 0), (0, 1), (1, 0), (1, 1)], &[(2, 2)]);
        assert_eq!(
            game_status(&g),
            GameStatus::WonBy(Player::One, SquareSpec { r: 0, c: 0, d: 1 })
        );
        // 1 2 1 / 1 2 2 / 2 1 1 holds no square for either side
        let g = Grid::decode(3, "121122211").unwrap();
        assert_eq!(game_status(&g), GameStatus::Draw);
    }

    #[test]
    fn rule_config_text_round_trip() {
        let cfg = RuleConfig::default();
        let text = cfg.to_string();
        assert_eq!(text, "symmetry=on diagonal=on useful=4:p2,5:p1 ordering=row-major");
        assert_eq!(text.parse::<RuleConfig>().unwrap(), cfg);
        let bare = RuleConfig::unrestricted();
        assert_eq!(bare.to_string().parse::<RuleConfig>().unwrap(), bare);
    }
}
