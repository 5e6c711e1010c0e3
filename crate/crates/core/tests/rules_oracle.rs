use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sqgame::board::{Cell, Grid, Player, Position};
use sqgame::rules::{forced_status, game_status, legal_candidates, ForcedStatus, GameStatus, RuleConfig};
use sqgame::solver::{oracle_value, GameValue};

fn wins_for(p: Player) -> GameValue {
    match p {
        Player::One => GameValue::P1Win,
        Player::Two => GameValue::P2Win,
    }
}

/// Every 3x3 position reachable by alternating play in which nobody has a
/// square yet and a move remains.
fn all_open_states_3() -> Vec<Grid> {
    let mut out = Vec::new();
    for code in 0..3usize.pow(9) {
        let mut cells = [Cell::Empty; 9];
        let mut x = code;
        for c in cells.iter_mut() {
            *c = Cell::from_digit(char::from(b'0' + (x % 3) as u8)).unwrap();
            x /= 3;
        }
        let ones = cells.iter().filter(|&&c| c == Cell::P1).count();
        let twos = cells.iter().filter(|&&c| c == Cell::P2).count();
        if ones != twos && ones != twos + 1 {
            continue;
        }
        let g = Grid::from_cells(3, &cells);
        if game_status(&g) == GameStatus::Ongoing && !g.is_full() {
            out.push(g);
        }
    }
    out
}

/// Random open 4x4 positions reached by alternating play.
fn sampled_states_4(count: usize, seed: u64) -> Vec<Grid> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let mut g = Grid::new(4);
        let mut cells: Vec<Position> = g.empty_cells().collect();
        cells.shuffle(&mut rng);
        let stones = 6 + out.len() % 5;
        for (i, p) in cells.into_iter().take(stones).enumerate() {
            let player = if i % 2 == 0 { Player::One } else { Player::Two };
            g.place(p, player).unwrap();
        }
        if game_status(&g) == GameStatus::Ongoing && !g.is_full() {
            out.push(g);
        }
    }
    out
}

fn check_cascade(g: &Grid) {
    let mover = g.to_move();
    let value = oracle_value(g).unwrap();
    match forced_status(g, mover) {
        ForcedStatus::InstantWin(p) => {
            assert_eq!(value, wins_for(mover), "{}", g.encode());
            let mut h = g.clone();
            h.place(p, mover).unwrap();
            assert!(h.completed_square(mover).is_some());
        }
        ForcedStatus::InstantLoss => {
            assert_eq!(value, wins_for(mover.opponent()), "{}", g.encode());
        }
        ForcedStatus::DilemmaWin(p) => {
            assert_eq!(value, wins_for(mover), "{}", g.encode());
            let mut h = g.clone();
            h.place(p, mover).unwrap();
            assert_eq!(oracle_value(&h).unwrap(), wins_for(mover));
        }
        ForcedStatus::ForcedBlock(p) => {
            let mut h = g.clone();
            h.place(p, mover).unwrap();
            assert!(h.completing_cells(mover.opponent()).is_empty(), "{}", g.encode());
            // blocking loses nothing
            assert_eq!(oracle_value(&h).unwrap(), value, "{}", g.encode());
        }
        ForcedStatus::Free => {
            assert!(g.completing_cells(mover).is_empty());
            assert!(g.completing_cells(mover.opponent()).is_empty());
        }
    }
}

#[test]
fn cascade_agrees_with_oracle_on_every_3x3_state() {
    let states = all_open_states_3();
    assert!(states.len() > 1000);
    for g in &states {
        check_cascade(g);
    }
}

#[test]
fn cascade_agrees_with_oracle_on_sampled_4x4_states() {
    for g in sampled_states_4(120, 7) {
        check_cascade(&g);
    }
}

/// Restricted candidate lists still contain an optimal move for the mover
/// whenever the position is free of threats.
#[test]
fn restrictions_keep_an_optimal_move_3x3() {
    let cfg = RuleConfig::default();
    for g in all_open_states_3() {
        let mover = g.to_move();
        if forced_status(&g, mover) != ForcedStatus::Free {
            continue;
        }
        let value = oracle_value(&g).unwrap();
        let best = legal_candidates(&g, mover, &cfg)
            .into_iter()
            .map(|p| {
                let mut h = g.clone();
                h.place(p, mover).unwrap();
                oracle_value(&h).unwrap()
            })
            .collect::<Vec<_>>();
        assert!(best.contains(&value), "{}: {value:?} not reachable", g.encode());
    }
}

#[test]
fn candidates_are_empty_cells() {
    let all = RuleConfig::unrestricted();
    for g in all_open_states_3() {
        let mover = g.to_move();
        let restricted = legal_candidates(&g, mover, &RuleConfig::default());
        let full = legal_candidates(&g, mover, &all);
        assert_eq!(full.len(), g.empty_cells().count());
        for p in &restricted {
            assert_eq!(g.cell(*p), Cell::Empty);
            assert!(full.contains(p));
        }
        assert!(!restricted.is_empty());
    }
}
