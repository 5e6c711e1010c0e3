use crate::board::{Cell, Grid, Player, Position};
use crate::rules::{forced_status, legal_candidates, ForcedStatus, RuleConfig};

use super::search::SearchConfig;
use super::strategy::StrategyTable;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerificationResult {
    /// Every line ends in a player-one square. The forced cascade settles
    /// each line within the move limit; the square itself may follow up to
    /// two moves later.
    AllLinesWin,
    /// No line ends in a player-one square.
    AllLinesNonLoss,
    /// A replayable line (moves from the empty board) where the strategy
    /// fails, with the reason.
    CounterexampleFound { line: Vec<Position>, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub states_visited: u64,
    /// Longest line seen, in moves.
    pub max_depth: usize,
    pub result: VerificationResult,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        !matches!(self.result, VerificationResult::CounterexampleFound { .. })
    }
}

struct Verifier<'a> {
    grid: Grid,
    table: &'a StrategyTable,
    cfg: &'a SearchConfig,
    opponent_rules: RuleConfig,
    side: Player,
    visited: u64,
    max_depth: usize,
}

struct Failure {
    line: Vec<Position>,
    reason: String,
}

impl Verifier<'_> {
    fn fail(&self, reason: impl Into<String>) -> Failure {
        Failure {
            line: self.grid.history().iter().map(|&(p, _)| p).collect(),
            reason: reason.into(),
        }
    }

    fn limit(&self) -> usize {
        let second = self.grid.history().get(1).map(|&(p, _)| p);
        self.cfg.max_moves.limit(self.cfg.n, second)
    }

    fn play(&mut self, p: Position, mover: Player) -> Result<(), Failure> {
        self.grid.push(p.index(self.cfg.n), mover);
        let res = self.visit();
        self.grid.pop();
        res
    }

    /// Leaf classification. `Some(Ok)` ends the line successfully.
    fn terminal(&mut self) -> Option<Result<(), Failure>> {
        let depth = self.grid.history().len();
        let ok = |v: &mut Self| {
            v.max_depth = v.max_depth.max(depth);
            Some(Ok(()))
        };
        if self.grid.completed_square(Player::One).is_some() {
            return match self.side {
                Player::One => ok(self),
                Player::Two => Some(Err(self.fail("player one completes a square"))),
            };
        }
        if self.grid.completed_square(Player::Two).is_some() {
            return match self.side {
                Player::Two => ok(self),
                Player::One => Some(Err(self.fail("player two completes a square"))),
            };
        }
        if !self.grid.has_live_square(Player::One) || self.grid.is_full() {
            return match self.side {
                Player::Two => ok(self),
                Player::One => Some(Err(self.fail("player one can no longer complete a square"))),
            };
        }
        None
    }

    /// Whether the cascade has already settled the game in player one's
    /// favour, so the move limit no longer applies.
    fn p1_decided(mover: Player, status: ForcedStatus) -> bool {
        matches!(
            (mover, status),
            (Player::One, ForcedStatus::InstantWin(_))
                | (Player::One, ForcedStatus::DilemmaWin(_))
                | (Player::Two, ForcedStatus::InstantLoss)
        )
    }

    fn visit(&mut self) -> Result<(), Failure> {
        self.visited += 1;
        if let Some(res) = self.terminal() {
            return res;
        }
        let mover = if self.grid.history().len().is_multiple_of(2) {
            Player::One
        } else {
            Player::Two
        };
        let status = forced_status(&self.grid, mover);
        let move_no = self.grid.history().len() + 1;
        if self.side == Player::One && move_no > self.limit() && !Self::p1_decided(mover, status) {
            return Err(self.fail(format!("game not decided within {} moves", self.limit())));
        }
        if mover == self.side {
            let p = match status {
                ForcedStatus::InstantWin(p) | ForcedStatus::ForcedBlock(p) | ForcedStatus::DilemmaWin(p) => p,
                ForcedStatus::InstantLoss => return Err(self.fail("strategy side faces two threats")),
                ForcedStatus::Free => {
                    let p = self
                        .table
                        .lookup(&self.grid)
                        .ok_or_else(|| self.fail(format!("no table entry for state {}", self.grid.encode())))?;
                    if self.grid.cell(p) != Cell::Empty {
                        return Err(self.fail(format!("table move {p} is on an occupied cell")));
                    }
                    p
                }
            };
            self.play(p, mover)
        } else {
            match status {
                // a block is the only reply that does not lose at once; an
                // opponent win or dilemma already refutes the table
                ForcedStatus::InstantWin(p) | ForcedStatus::ForcedBlock(p) | ForcedStatus::DilemmaWin(p) => {
                    self.play(p, mover)
                }
                ForcedStatus::InstantLoss | ForcedStatus::Free => {
                    for p in legal_candidates(&self.grid, mover, &self.opponent_rules) {
                        self.play(p, mover)?;
                    }
                    Ok(())
                }
            }
        }
    }
}

/// Plays the table against every opponent line the discipline allows and
/// checks the table's aim on each.
pub fn verify_strategy(table: &StrategyTable, cfg: &SearchConfig) -> VerificationReport {
    let mut opponent_rules = cfg.rules.clone();
    // The useful-vertex filter narrows the strategy side's choices; it is
    // not a sound restriction on the opponent.
    opponent_rules
        .useful_vertex_restriction_for
        .retain(|&(_, p)| p == table.side);
    let mut verifier = Verifier {
        grid: Grid::new(cfg.n),
        table,
        cfg,
        opponent_rules,
        side: table.side,
        visited: 0,
        max_depth: 0,
    };
    let result = if table.n != cfg.n {
        VerificationResult::CounterexampleFound {
            line: Vec::new(),
            reason: format!("table is for n = {}, not {}", table.n, cfg.n),
        }
    } else {
        match verifier.visit() {
            Ok(()) => match table.side {
                Player::One => VerificationResult::AllLinesWin,
                Player::Two => VerificationResult::AllLinesNonLoss,
            },
            Err(Failure { line, reason }) => VerificationResult::CounterexampleFound { line, reason },
        }
    };
    VerificationReport {
        states_visited: verifier.visited,
        max_depth: verifier.max_depth,
        result,
    }
}
