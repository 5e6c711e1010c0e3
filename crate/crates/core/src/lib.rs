//! Square achievement game: two players alternately claim cells of an
//! `n × n` grid, and whoever first owns the four vertices of an axis-aligned
//! square wins.
//!
//! The crate provides the board model ([`board`], [`symmetry`]), the
//! forced-move discipline ([`rules`]), a backtracking solver with strategy
//! extraction and verification ([`solver`]), and a live opponent built on
//! extracted strategies ([`engine`]).

pub mod board;
pub mod engine;
pub mod report;
pub mod rules;
pub mod solver;
pub mod strategies;
pub mod symmetry;

pub use board::{enumerate_squares, BoardError, Cell, Grid, Player, Position, SquareSpec};
pub use rules::{forced_status, game_status, legal_candidates, ForcedStatus, GameStatus, MoveOrdering, RuleConfig};
pub use symmetry::{canonical_form, Transform};
