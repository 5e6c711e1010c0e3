use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::strategy::StrategyTable;
use super::verify::verify_strategy;
use crate::board::{Grid, Player, Position};
use crate::rules::{forced_status, legal_candidates, ForcedStatus, RuleConfig};
use crate::symmetry::{canonical_form, Transform};

/// Upper bound on the length of a game considered by the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MaxMovesPolicy {
    /// 5×5 only: 17 moves if player two's first stone is on an edge
    /// midpoint, 13 on a corner or next to the centre, 11 otherwise.
    PaperN5,
    Fixed(usize),
    None,
}

impl MaxMovesPolicy {
    /// Move limit for a line whose second move is `second_move` (absent
    /// while fewer than two moves have been played).
    pub fn limit(self, n: usize, second_move: Option<Position>) -> usize {
        match self {
            MaxMovesPolicy::None => n * n,
            MaxMovesPolicy::Fixed(k) => k,
            MaxMovesPolicy::PaperN5 => match second_move {
                None => n * n,
                Some(p) => paper_n5_limit(p),
            },
        }
    }
}

impl fmt::Display for MaxMovesPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxMovesPolicy::PaperN5 => f.write_str("paper-n5"),
            MaxMovesPolicy::Fixed(k) => write!(f, "fixed({k})"),
            MaxMovesPolicy::None => f.write_str("none"),
        }
    }
}

impl FromStr for MaxMovesPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper-n5" => Ok(MaxMovesPolicy::PaperN5),
            "none" => Ok(MaxMovesPolicy::None),
            _ => {
                let inner = s
                    .strip_prefix("fixed(")
                    .and_then(|rest| rest.strip_suffix(')'))
                    .unwrap_or(s);
                inner
                    .parse()
                    .map(MaxMovesPolicy::Fixed)
                    .map_err(|_| format!("unknown move limit policy {s:?}"))
            }
        }
    }
}

// The limits are keyed on the position class of the second stone. The search
// only ever plays it inside the symmetry-reduced region, but engines and
// verification may see any of its images, so compare whole orbits.
fn paper_n5_limit(second: Position) -> usize {
    let in_orbit = |target: Position| Transform::ALL.iter().any(|t| t.apply(second, 5) == target);
    if in_orbit(Position::new(0, 2)) {
        17
    } else if in_orbit(Position::new(0, 0)) || in_orbit(Position::new(1, 2)) {
        13
    } else {
        11
    }
}

/// Move limit for a game whose second move is `second_move`.
pub fn max_moves_for(second_move: Position, policy: MaxMovesPolicy, n: usize) -> Result<usize, SearchError> {
    if policy == MaxMovesPolicy::PaperN5 && n != 5 {
        return Err(SearchError::PolicyMismatch { n, policy });
    }
    Ok(policy.limit(n, Some(second_move)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub n: usize,
    pub rules: RuleConfig,
    pub max_moves: MaxMovesPolicy,
    /// Placements between progress ticks.
    pub progress_interval: u64,
}

impl SearchConfig {
    pub fn new(n: usize) -> Self {
        SearchConfig {
            n,
            rules: RuleConfig::default(),
            max_moves: MaxMovesPolicy::None,
            progress_interval: 100_000,
        }
    }

    pub fn with_max_moves(mut self, policy: MaxMovesPolicy) -> Self {
        self.max_moves = policy;
        self
    }

    pub fn with_rules(mut self, rules: RuleConfig) -> Self {
        self.rules = rules;
        self
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.n < 3 {
            return Err(SearchError::UnsupportedSize(self.n));
        }
        match self.max_moves {
            MaxMovesPolicy::PaperN5 if self.n != 5 => Err(SearchError::PolicyMismatch {
                n: self.n,
                policy: self.max_moves,
            }),
            MaxMovesPolicy::Fixed(k) if k == 0 || k > self.n * self.n => Err(SearchError::PolicyMismatch {
                n: self.n,
                policy: self.max_moves,
            }),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    /// Player one can force a square.
    P1Win,
    /// Player two can keep player one from completing a square.
    NoP1Win,
}

impl Outcome {
    /// The word printed in reports: `win` or `draw`.
    pub fn word(self) -> &'static str {
        match self {
            Outcome::P1Win => "win",
            Outcome::NoP1Win => "draw",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub outcome: Outcome,
    /// Placements made during the search.
    pub moves_total: u64,
    /// Moves retracted because they failed player one's aim.
    pub backtracks_p1: u64,
    /// Moves retracted because they failed player two's aim.
    pub backtracks_p2: u64,
    pub elapsed: Duration,
}

impl SearchReport {
    pub fn backtracks(&self, player: Player) -> u64 {
        match player {
            Player::One => self.backtracks_p1,
            Player::Two => self.backtracks_p2,
        }
    }

    /// Same search result, ignoring wall-clock time.
    pub fn same_counts(&self, other: &SearchReport) -> bool {
        self.outcome == other.outcome
            && self.moves_total == other.moves_total
            && self.backtracks_p1 == other.backtracks_p1
            && self.backtracks_p2 == other.backtracks_p2
    }
}

#[derive(Debug, Clone, Error)]
pub enum SearchError {
    #[error("board size {0} is not supported (need n >= 3)")]
    UnsupportedSize(usize),
    #[error("move limit policy {policy} is not valid for n = {n}")]
    PolicyMismatch { n: usize, policy: MaxMovesPolicy },
    #[error("strategy table is for n = {table_n}, search is for n = {n}")]
    TableMismatch { n: usize, table_n: usize },
    #[error("search interrupted after {} moves", .0.moves_total)]
    Interrupted(SearchReport),
    #[error("{side} cannot reach its aim under this configuration; nothing to extract")]
    ExtractionFailed { side: Player },
}

/// Hooks the search calls while it runs.
pub trait SearchObserver {
    /// Called every `progress_interval` placements.
    fn tick(&mut self, _moves_total: u64) {}

    /// Polled periodically; returning true aborts the search.
    fn cancelled(&self) -> bool {
        false
    }
}

pub struct NoObserver;

impl SearchObserver for NoObserver {}

struct Interrupted;

/// Canonical-frame entries, each with the tightest move limit it has been
/// proven under, plus an undo log so failed subtrees can be rolled back.
struct Recorder {
    side: Player,
    entries: HashMap<String, (Position, usize)>,
    log: Vec<(String, Option<(Position, usize)>)>,
}

impl Recorder {
    fn set(&mut self, key: String, value: (Position, usize)) {
        let previous = self.entries.insert(key.clone(), value);
        self.log.push((key, previous));
    }

    fn rollback(&mut self, mark: usize) {
        while self.log.len() > mark {
            let (key, previous) = self.log.pop().unwrap();
            match previous {
                Some(v) => self.entries.insert(key, v),
                None => self.entries.remove(&key),
            };
        }
    }
}

struct Searcher<'a> {
    grid: Grid,
    cfg: &'a SearchConfig,
    fixed: Option<&'a StrategyTable>,
    recorder: Option<Recorder>,
    observer: &'a mut dyn SearchObserver,
    limit: usize,
    moves: u64,
    backtracks: [u64; 2],
    next_tick: u64,
}

const CANCEL_POLL_MASK: u64 = 0x3ff;

impl<'a> Searcher<'a> {
    fn new(cfg: &'a SearchConfig, observer: &'a mut dyn SearchObserver) -> Self {
        let interval = cfg.progress_interval.max(1);
        Searcher {
            grid: Grid::new(cfg.n),
            cfg,
            fixed: None,
            recorder: None,
            observer,
            limit: cfg.max_moves.limit(cfg.n, None),
            moves: 0,
            backtracks: [0, 0],
            next_tick: interval,
        }
    }

    fn report(&self, outcome: Outcome, started: Instant) -> SearchReport {
        SearchReport {
            outcome,
            moves_total: self.moves,
            backtracks_p1: self.backtracks[0],
            backtracks_p2: self.backtracks[1],
            elapsed: started.elapsed(),
        }
    }

    fn mover(&self) -> Player {
        if self.grid.history().len().is_multiple_of(2) {
            Player::One
        } else {
            Player::Two
        }
    }

    fn play(&mut self, p: Position, player: Player) -> Result<(), Interrupted> {
        self.grid.push(p.index(self.cfg.n), player);
        if self.grid.history().len() == 2 {
            self.limit = self.cfg.max_moves.limit(self.cfg.n, Some(p));
        }
        self.moves += 1;
        if self.moves == self.next_tick {
            self.next_tick += self.cfg.progress_interval.max(1);
            self.observer.tick(self.moves);
        }
        if self.moves & CANCEL_POLL_MASK == 0 && self.observer.cancelled() {
            return Err(Interrupted);
        }
        Ok(())
    }

    fn retract(&mut self) {
        self.grid.pop();
        if self.grid.history().len() == 1 {
            self.limit = self.cfg.max_moves.limit(self.cfg.n, None);
        }
    }

    /// Plays `p`, evaluates the subtree and takes the move back. Returns
    /// whether player one still wins.
    fn try_move(&mut self, p: Position, mover: Player) -> Result<bool, Interrupted> {
        let played = self.play(p, mover);
        let result = match played {
            Ok(()) => self.p1_wins(),
            Err(e) => Err(e),
        };
        self.retract();
        let p1_wins = result?;
        if p1_wins != (mover == Player::One) {
            self.backtracks[if mover == Player::One { 0 } else { 1 }] += 1;
        }
        Ok(p1_wins)
    }

    fn p1_wins(&mut self) -> Result<bool, Interrupted> {
        let mover = self.mover();
        let move_no = self.grid.history().len() + 1;
        if !self.grid.has_live_square(Player::One) || move_no > self.limit {
            return Ok(false);
        }
        // Decisions of the cascade count at the move where they are seen;
        // cashing in a dilemma may run up to two moves past the limit.
        match forced_status(&self.grid, mover) {
            ForcedStatus::InstantWin(_) => Ok(mover == Player::One),
            ForcedStatus::InstantLoss => Ok(mover == Player::Two),
            ForcedStatus::DilemmaWin(_) => Ok(mover == Player::One),
            ForcedStatus::ForcedBlock(p) => self.try_move(p, mover),
            ForcedStatus::Free => self.free_node(mover),
        }
    }

    fn table_move(&self, table: &StrategyTable) -> Option<Position> {
        table
            .lookup(&self.grid)
            .filter(|p| self.grid.cell(*p) == crate::board::Cell::Empty)
    }

    fn free_node(&mut self, mover: Player) -> Result<bool, Interrupted> {
        if let Some(table) = self.fixed.filter(|t| t.side == mover) {
            if let Some(p) = self.table_move(table) {
                return self.try_move(p, mover);
            }
        }
        if self.recorder.as_ref().is_some_and(|r| r.side == mover) {
            return self.recording_node(mover);
        }
        let candidates = legal_candidates(&self.grid, mover, &self.cfg.rules);
        if candidates.is_empty() {
            return Ok(false);
        }
        for p in candidates {
            let p1_wins = self.try_move(p, mover)?;
            if p1_wins == (mover == Player::One) {
                return Ok(p1_wins);
            }
        }
        Ok(mover == Player::Two)
    }

    /// A free node of the side whose strategy is being extracted: commit
    /// the first move that keeps its aim and record it.
    ///
    /// A state can come back through another move order with a different
    /// move limit. An entry proven under limit `L` also wins under any
    /// looser limit, so it is reused as is; under a tighter limit it is
    /// proven again or replaced by a move that works there, which is then
    /// still good for every looser line that relied on the old entry.
    fn recording_node(&mut self, mover: Player) -> Result<bool, Interrupted> {
        let (key, t) = canonical_form(&self.grid);
        let n = self.cfg.n;
        let goal = mover == Player::One;
        let limit = self.limit;
        let recorder = self.recorder.as_ref().expect("recording node without recorder");
        let mut candidates = legal_candidates(&self.grid, mover, &self.cfg.rules);
        match recorder.entries.get(&key) {
            Some(&(_, proven)) if limit >= proven => return Ok(goal),
            Some(&(q, _)) => {
                let existing = t.inverse().apply(q, n);
                candidates.retain(|&p| p != existing);
                candidates.insert(0, existing);
            }
            None => {}
        }
        for p in candidates {
            let mark = self.recorder.as_ref().unwrap().log.len();
            let p1_wins = self.try_move(p, mover)?;
            let rec = self.recorder.as_mut().unwrap();
            if p1_wins == goal {
                rec.set(key, (t.apply(p, n), limit));
                return Ok(p1_wins);
            }
            rec.rollback(mark);
        }
        Ok(!goal)
    }

    fn run(&mut self, started: Instant) -> Result<SearchReport, SearchError> {
        match self.p1_wins() {
            Ok(win) => {
                let outcome = if win { Outcome::P1Win } else { Outcome::NoP1Win };
                debug_assert!(self.grid.history().is_empty());
                Ok(self.report(outcome, started))
            }
            Err(Interrupted) => {
                // unwinding already retracted every move
                Err(SearchError::Interrupted(self.report(Outcome::NoP1Win, started)))
            }
        }
    }
}

/// Decides whether player one can force a square under the move discipline.
pub fn solve(cfg: &SearchConfig) -> Result<SearchReport, SearchError> {
    solve_with(cfg, None, &mut NoObserver)
}

/// [`solve`] with an optional strategy table fixing one side's free moves,
/// and an observer for progress and cancellation.
pub fn solve_with(
    cfg: &SearchConfig,
    table: Option<&StrategyTable>,
    observer: &mut dyn SearchObserver,
) -> Result<SearchReport, SearchError> {
    cfg.validate()?;
    if let Some(t) = table {
        if t.n != cfg.n {
            return Err(SearchError::TableMismatch { n: cfg.n, table_n: t.n });
        }
    }
    let started = Instant::now();
    let mut searcher = Searcher::new(cfg, observer);
    searcher.fixed = table;
    searcher.run(started)
}

/// Builds a strategy table for `side`: at each of its free decisions the
/// first candidate that keeps its aim against every reply. The table's
/// move bound is measured by verifying it.
pub fn extract_strategy(cfg: &SearchConfig, side: Player) -> Result<StrategyTable, SearchError> {
    cfg.validate()?;
    let started = Instant::now();
    let mut observer = NoObserver;
    let mut searcher = Searcher::new(cfg, &mut observer);
    searcher.recorder = Some(Recorder {
        side,
        entries: HashMap::new(),
        log: Vec::new(),
    });
    let report = searcher.run(started)?;
    let achieved = match side {
        Player::One => report.outcome == Outcome::P1Win,
        Player::Two => report.outcome == Outcome::NoP1Win,
    };
    if !achieved {
        return Err(SearchError::ExtractionFailed { side });
    }
    let entries = searcher.recorder.take().unwrap().entries;
    let mut table = StrategyTable::new(cfg.n, side, cfg.rules.clone(), cfg.max_moves);
    table.entries = entries.into_iter().map(|(k, (p, _))| (k, p)).collect();
    let verification = verify_strategy(&table, cfg);
    table.bound = verification.max_depth;
    Ok(table)
}
