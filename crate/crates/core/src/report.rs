//! Search result documents: a human-readable text block and a JSON form
//! with stable field names.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::solver::{Outcome, SearchReport};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunResult {
    pub n: usize,
    /// `win` or `draw`.
    pub outcome: String,
    pub moves_total: u64,
    pub backtracks_p1: u64,
    pub backtracks_p2: u64,
    pub elapsed_ms: u64,
}

impl RunResult {
    pub fn from_report(n: usize, report: &SearchReport) -> Self {
        RunResult {
            n,
            outcome: report.outcome.word().to_string(),
            moves_total: report.moves_total,
            backtracks_p1: report.backtracks_p1,
            backtracks_p2: report.backtracks_p2,
            elapsed_ms: report.elapsed.as_millis() as u64,
        }
    }

    pub fn outcome(&self) -> Option<Outcome> {
        match self.outcome.as_str() {
            "win" => Some(Outcome::P1Win),
            "draw" => Some(Outcome::NoP1Win),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReportDocument {
    pub results: Vec<RunResult>,
}

impl RunReportDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Header printed once before the first search.
pub fn text_banner(progress_interval: u64) -> String {
    format!(
        "=== Checking solutions for the square achievement game problem ===\n\n\
         Hints:\n  After each {progress_interval} moves a + will be emitted.\n  \
         To cancel the execution press Ctrl-C .\n"
    )
}

pub fn text_start(n: usize) -> String {
    format!("\nStarting search with n = {n}\n")
}

/// Result block for one finished search.
pub fn text_result(result: &RunResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\nThe search has been completed. Result: {}", result.outcome);
    let _ = writeln!(
        out,
        "Sum of moves: {}. N. of backtrack.: Player 1: {}, Player 2: {}",
        result.moves_total, result.backtracks_p1, result.backtracks_p2
    );
    let _ = writeln!(
        out,
        "(counters are ordering-dependent; elapsed {} ms)",
        result.elapsed_ms
    );
    out
}

/// Result block for an interrupted search.
pub fn text_interrupted(result: &RunResult) -> String {
    format!(
        "\nThe search has been cancelled.\nSum of moves: {}. N. of backtrack.: Player 1: {}, Player 2: {}\n",
        result.moves_total, result.backtracks_p1, result.backtracks_p2
    )
}
