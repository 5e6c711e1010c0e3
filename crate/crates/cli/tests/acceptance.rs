//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqgame::board::{Cell, Grid, Player, Position};
use sqgame::rules::{forced_status, game_status, ForcedStatus, GameStatus, RuleConfig};
use sqgame::solver::{
    extract_strategy, oracle_minimax, oracle_value, solve, verify_strategy, GameValue, Outcome, SearchConfig,
    StrategyTable, VerificationResult,
};
use sqgame::symmetry::canonical_form;
use sqgame::{strategies, Transform};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn run_cli(args: &[&str]) -> (Option<i32>, String, Duration) {
    let started = Instant::now();
    let o = Command::new(env!("CARGO_BIN_EXE_sqgame"))
        .args(args)
        .env_remove(strategies::STRATEGY_DIR_ENV)
        .output()
        .expect("sqgame runs");
    (o.status.code(), String::from_utf8_lossy(&o.stdout).into_owned(), started.elapsed())
}

fn solve_cli(n: &str, word: &str, budget: Duration) -> Check {
    let (code, out, took) = run_cli(&["solve", "--n", n]);
    ensure(code == Some(0), format!("exit code {code:?}"))?;
    ensure(out.contains(&format!("Result: {word}")), format!("no \"Result: {word}\" line"))?;
    ensure(took < budget, format!("took {took:.2?}, budget {budget:?}"))?;
    let counters = out.lines().find(|l| l.starts_with("Sum of moves")).unwrap_or_default();
    Ok(format!("Result: {word} in {took:.2?}; {counters}"))
}

fn machine_counts(n: &str) -> Result<serde_json::Value, String> {
    let (code, out, _) = run_cli(&["solve", "--n", n, "--report", "machine"]);
    ensure(code == Some(0), format!("n = {n}: exit code {code:?}"))?;
    let mut doc: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let r = doc["results"][0].as_object_mut().ok_or("no result")?;
    r.remove("elapsed_ms");
    Ok(serde_json::Value::Object(r.clone()))
}

fn zero_backtracks() -> Check {
    let mut parts = Vec::new();
    for (n, key) in [("3", "backtracks_p2"), ("4", "backtracks_p2"), ("5", "backtracks_p1")] {
        let a = machine_counts(n)?;
        let b = machine_counts(n)?;
        ensure(a == b, format!("n = {n}: counters differ between runs: {a} vs {b}"))?;
        ensure(a[key] == 0, format!("n = {n}: {key} = {}", a[key]))?;
        parts.push(format!("n={n} {key}=0 moves={}", a["moves_total"]));
    }
    Ok(format!("{}; identical across two runs", parts.join(", ")))
}

fn oracle_equivalence() -> Check {
    let oracle = oracle_minimax(3).map_err(|e| e.to_string())?;
    ensure(oracle == GameValue::Draw, format!("oracle(3) = {oracle:?}"))?;
    let base = RuleConfig::default();
    let mut no_useful = base.clone();
    no_useful.useful_vertex_restriction_for.clear();
    let variants = [
        ("all restrictions", base.clone()),
        ("no symmetry", RuleConfig { use_symmetry_restriction: false, ..base.clone() }),
        ("no diagonal", RuleConfig { use_diagonal_first_move_restriction: false, ..base.clone() }),
        ("no useful-vertex", no_useful),
        ("none", RuleConfig::unrestricted()),
    ];
    for (name, rules) in variants {
        let r = solve(&SearchConfig::new(3).with_rules(rules)).map_err(|e| e.to_string())?;
        ensure(r.outcome == Outcome::NoP1Win, format!("solve(3) with {name}: {:?}", r.outcome))?;
    }
    Ok("oracle(3) = Draw = solve(3); draw with each restriction off".into())
}

fn verification() -> Check {
    let mut parts = Vec::new();
    for n in 3..=5 {
        let side = strategies::guaranteed_side(n).unwrap();
        let table = strategies::bundled(n, side).unwrap();
        let started = Instant::now();
        let rep = verify_strategy(&table, &strategies::derivation_config(n));
        let took = started.elapsed();
        let want = match side {
            Player::One => VerificationResult::AllLinesWin,
            Player::Two => VerificationResult::AllLinesNonLoss,
        };
        ensure(rep.result == want, format!("n = {n}: {:?}", rep.result))?;
        ensure(took < Duration::from_secs(60), format!("n = {n}: took {took:.2?}"))?;
        ensure(rep.max_depth <= table.bound, format!("n = {n}: line of {} moves", rep.max_depth))?;
        parts.push(format!("n={n} {want:?} ({} states, {took:.2?})", rep.states_visited));
    }
    Ok(parts.join(", "))
}

// ---- invariants ----

fn random_grid(rng: &mut ChaCha8Rng) -> Grid {
    let n = rng.gen_range(3..=6);
    let mut g = Grid::new(n);
    let len = rng.gen_range(0..=n * n);
    for i in 0..len {
        let empty: Vec<Position> = g.empty_cells().collect();
        let p = *empty.choose(rng).unwrap();
        g.place(p, if i % 2 == 0 { Player::One } else { Player::Two }).unwrap();
    }
    g
}

fn coherence_and_undo(rng: &mut ChaCha8Rng, runs: usize) -> Result<(), String> {
    for run in 0..runs {
        let mut g = random_grid(rng);
        ensure(g.counts() == &g.recount()[..], format!("run {run}: counts drift after placing"))?;
        let first_empty = g.empty_cells().next();
        if let Some(p) = first_empty {
            let before = g.clone();
            g.place(p, g.to_move()).unwrap();
            g.undo_last().unwrap();
            ensure(g == before, format!("run {run}: undo is not an inverse"))?;
        }
        for _ in 0..rng.gen_range(0..=g.history().len()) {
            g.undo_last().unwrap();
            ensure(g.counts() == &g.recount()[..], format!("run {run}: counts drift after undo"))?;
        }
    }
    Ok(())
}

fn equivariance(rng: &mut ChaCha8Rng, runs: usize) -> Result<(), String> {
    for run in 0..runs {
        let g = random_grid(rng);
        let n = g.n();
        let canon = canonical_form(&g).0;
        for t in Transform::ALL {
            let h = g.transform(t);
            for p in [Player::One, Player::Two] {
                let mut mapped: Vec<Position> = g.completing_cells(p).iter().map(|&q| t.apply(q, n)).collect();
                mapped.sort_by_key(|q| q.index(n));
                ensure(h.completing_cells(p) == mapped, format!("run {run}: completing cells under {t}"))?;
                ensure(
                    h.completed_square(p).is_some() == g.completed_square(p).is_some(),
                    format!("run {run}: completed square under {t}"),
                )?;
                ensure(h.has_live_square(p) == g.has_live_square(p), format!("run {run}: live square under {t}"))?;
            }
            ensure(canonical_form(&h).0 == canon, format!("run {run}: canonical form differs under {t}"))?;
        }
    }
    Ok(())
}

/// Checks the cascade on every open 3x3 state: the order of the checks
/// against brute-force threat counts, and each decisive verdict against
/// the oracle.
fn pipeline_against_oracle() -> Result<usize, String> {
    let mut checked = 0;
    for code in 0..3usize.pow(9) {
        let mut x = code;
        let cells: Vec<Cell> = (0..9)
            .map(|_| {
                let c = [Cell::Empty, Cell::P1, Cell::P2][x % 3];
                x /= 3;
                c
            })
            .collect();
        let ones = cells.iter().filter(|&&c| c == Cell::P1).count();
        let twos = cells.iter().filter(|&&c| c == Cell::P2).count();
        if ones != twos && ones != twos + 1 {
            continue;
        }
        let g = Grid::from_cells(3, &cells);
        if game_status(&g) != GameStatus::Ongoing || g.is_full() {
            continue;
        }
        let mover = g.to_move();
        let own = g.completing_cells(mover).len();
        let theirs = g.completing_cells(mover.opponent()).len();
        let forks = g.empty_cells().any(|p| {
            let mut h = g.clone();
            h.place(p, mover).unwrap();
            h.completing_cells(mover).len() >= 2
        });
        let status = forced_status(&g, mover);
        let expected = if own > 0 {
            "win"
        } else if theirs >= 2 {
            "loss"
        } else if theirs == 1 {
            "block"
        } else if forks {
            "dilemma"
        } else {
            "free"
        };
        let got = match status {
            ForcedStatus::InstantWin(_) => "win",
            ForcedStatus::InstantLoss => "loss",
            ForcedStatus::ForcedBlock(_) => "block",
            ForcedStatus::DilemmaWin(_) => "dilemma",
            ForcedStatus::Free => "free",
        };
        ensure(got == expected, format!("{}: {got} but expected {expected}", g.encode()))?;
        let value = oracle_value(&g).map_err(|e| e.to_string())?;
        let mover_wins = if mover == Player::One { GameValue::P1Win } else { GameValue::P2Win };
        let mover_loses = if mover == Player::One { GameValue::P2Win } else { GameValue::P1Win };
        match status {
            ForcedStatus::InstantWin(_) | ForcedStatus::DilemmaWin(_) => {
                ensure(value == mover_wins, format!("{}: {got} but oracle says {value:?}", g.encode()))?
            }
            ForcedStatus::InstantLoss => {
                ensure(value == mover_loses, format!("{}: loss but oracle says {value:?}", g.encode()))?
            }
            _ => {}
        }
        checked += 1;
    }
    Ok(checked)
}

fn invariants() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    coherence_and_undo(&mut rng, 1000).map_err(|e| format!("coherence/undo: {e}"))?;
    equivariance(&mut rng, 300).map_err(|e| format!("equivariance: {e}"))?;
    let states = pipeline_against_oracle().map_err(|e| format!("cascade: {e}"))?;
    Ok(format!(
        "count coherence and undo over 1000 random sequences; 8-transform equivariance and orbit \
         invariance over 300 positions; cascade order and verdicts on {states} 3x3 states"
    ))
}

fn round_trip() -> Check {
    let dir = std::env::temp_dir().join(format!("sqgame-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for n in 3..=5 {
        let side = strategies::guaranteed_side(n).unwrap();
        let cfg = strategies::derivation_config(n);
        let started = Instant::now();
        let table = extract_strategy(&cfg, side).map_err(|e| format!("n = {n}: {e}"))?;
        let path = dir.join(strategies::file_name(n, side));
        table.save(&path).map_err(|e| e.to_string())?;
        let loaded = StrategyTable::load(&path).map_err(|e| e.to_string())?;
        ensure(loaded == table, format!("n = {n}: reloaded table differs"))?;
        let a = verify_strategy(&table, &cfg);
        let b = verify_strategy(&loaded, &cfg);
        ensure(a.passed() && a == b, format!("n = {n}: {:?} vs {:?}", a.result, b.result))?;
        // the bundled table is this derivation
        ensure(
            strategies::bundled(n, side).as_ref() == Some(&table),
            format!("n = {n}: bundled table differs from a fresh extraction"),
        )?;
        parts.push(format!("n={n} {} states ({:.1?})", table.len(), started.elapsed()));
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{}; each identical to the bundled table", parts.join(", ")))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("solve --n 3 reports a draw in under 1 s", || solve_cli("3", "draw", Duration::from_secs(1))),
        ("solve --n 4 reports a draw in under 60 s", || solve_cli("4", "draw", Duration::from_secs(60))),
        ("solve --n 5 reports a win in under 60 s", || solve_cli("5", "win", Duration::from_secs(60))),
        ("zero backtracks for the proven side, deterministic counters", zero_backtracks),
        ("oracle equivalence and restriction soundness on 3x3", oracle_equivalence),
        ("exhaustive strategy verification for n = 3, 4, 5", verification),
        ("invariant suites", invariants),
        ("strategy file round trip", round_trip),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let started = Instant::now();
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail} [{:.2?}]", started.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
