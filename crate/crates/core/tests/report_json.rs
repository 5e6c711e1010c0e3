use sqgame::report::{RunReportDocument, RunResult};
use sqgame::solver::{solve, Outcome, SearchConfig};

#[test]
fn run_report_round_trips_through_json() {
    let report = solve(&SearchConfig::new(3)).unwrap();
    let doc = RunReportDocument {
        results: vec![RunResult::from_report(3, &report)],
    };
    let text = doc.to_json();
    for field in ["\"n\"", "\"outcome\"", "\"moves_total\"", "\"backtracks_p1\"", "\"backtracks_p2\"", "\"elapsed_ms\""] {
        assert!(text.contains(field), "missing {field}");
    }
    let back = RunReportDocument::from_json(&text).unwrap();
    assert_eq!(back, doc);
    assert_eq!(back.results[0].outcome(), Some(Outcome::NoP1Win));
    assert_eq!(back.results[0].moves_total, report.moves_total);
}

#[test]
fn unknown_outcome_word_is_not_an_outcome() {
    let r: RunResult = serde_json::from_str(
        r#"{"n":3,"outcome":"maybe","moves_total":0,"backtracks_p1":0,"backtracks_p2":0,"elapsed_ms":0}"#,
    )
    .unwrap();
    assert_eq!(r.outcome(), None);
}
